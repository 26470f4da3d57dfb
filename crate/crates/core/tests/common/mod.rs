#![allow(dead_code)]

use foliate_core::foliation::uniform_ts;
use foliate_core::{BaseDomain, BaseShape, LeafFamily};

pub fn rect(n: usize) -> BaseDomain {
    BaseDomain::unit(BaseShape::Rectangle, n).unwrap()
}

pub fn annulus(n: usize) -> BaseDomain {
    BaseDomain::unit(BaseShape::Annulus, n).unwrap()
}

/// `f_t(x, y) = t + shear * t (1 - t) x`, anchored on `x = 0`.
pub fn sheared(base: BaseDomain, m: usize, shear: f64) -> LeafFamily {
    LeafFamily::from_fn(base, uniform_ts(m), [0, 0], move |t, x, _| {
        t + shear * t * (1.0 - t) * x
    })
    .unwrap()
}

pub fn horizontal(base: BaseDomain, m: usize) -> LeafFamily {
    LeafFamily::horizontal(base, m).unwrap()
}

/// Leaves tilted with slope `slope` in `x` for `t` in `[0.2, 0.8]`,
/// tapering linearly to the flat boundary leaves.
pub fn tilted(base: BaseDomain, m: usize, slope: f64) -> LeafFamily {
    let phi = |t: f64| (5.0 * t).min(5.0 * (1.0 - t)).min(1.0);
    LeafFamily::from_fn(base, uniform_ts(m), [0, 0], move |t, x, _| t + slope * x * phi(t)).unwrap()
}

/// Positive root of `0.5 t^2 - 1.5 t + z = 0`, the leaf of the 0.5-sheared
/// family through height `z` over `x = 1`.
pub fn sheared_leaf_at_one(z: f64) -> f64 {
    1.5 - (2.25 - 2.0 * z).sqrt()
}
