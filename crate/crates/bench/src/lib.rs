//! Fixtures shared by the benchmarks.

use foliate_core::decomposition::{build_torus_scene, reference_family, DecompositionComplex};
use foliate_core::foliation::uniform_ts;
use foliate_core::{BaseDomain, BaseShape, InsertionSchedule, LeafFamily};

/// `t + shear t (1 - t) x` over the unit square.
pub fn sheared_square(n: usize, m: usize, shear: f64) -> LeafFamily {
    let base = BaseDomain::unit(BaseShape::Rectangle, n).expect("valid base");
    LeafFamily::from_fn(base, uniform_ts(m), [0, 0], move |t, x, _| t + shear * t * (1.0 - t) * x)
        .expect("valid family")
}

pub fn horizontal_square(n: usize, m: usize) -> LeafFamily {
    LeafFamily::horizontal(BaseDomain::unit(BaseShape::Rectangle, n).expect("valid base"), m).expect("valid family")
}

/// Schedule with `k` equally spaced points of total weight `total`.
pub fn uniform_schedule(k: usize, total: f64) -> InsertionSchedule {
    let w = total / k as f64;
    InsertionSchedule::new((1..=k).map(|i| (i as f64 / (k + 1) as f64, w)).collect()).expect("valid schedule")
}

/// 2 x 2 torus scene over the reference family.
pub fn torus_scene(n: usize, m: usize, shear: f64) -> DecompositionComplex {
    build_torus_scene(2, 2, &[], Some(reference_family(n, m, shear).expect("valid family"))).expect("valid scene")
}
