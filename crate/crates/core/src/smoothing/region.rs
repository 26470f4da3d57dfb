use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foliation::BaseDomain;
use crate::kernel::exp_bump;

/// Region of a base domain together with its regular neighborhood.
///
/// `weight` is the damping function of the region: 1 on the core, 0 off the
/// neighborhood, and a flat-ended ramp in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RegionMask {
    /// Core `[lo, hi]`; the neighborhood grows it by `margin` on every side.
    /// Periodic axes measure distance around the circle.
    Rect { lo: [f64; 2], hi: [f64; 2], margin: f64 },
    /// Complement of the bands `y <= width` and `y >= ly - width`; the weight
    /// vanishes on both bands and reaches 1 at distance `width + ramp`.
    Bands { width: f64, ramp: f64 },
    /// Boundary collar of depth `width`, damped to 0 over a further `ramp`.
    Collar { width: f64, ramp: f64 },
}

impl RegionMask {
    pub fn validate(&self, base: &BaseDomain) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidRegion(m));
        match *self {
            RegionMask::Rect { lo, hi, margin } => {
                if !(margin > 0.0) {
                    return bad(format!("margin {margin} must be positive"));
                }
                for a in 0..2 {
                    if !(hi[a] >= lo[a]) {
                        return bad(format!("empty core along axis {a}"));
                    }
                }
            }
            RegionMask::Bands { width, ramp } => {
                if base.periodic()[1] {
                    return bad("bands need a non-periodic second axis".into());
                }
                if !(width > 0.0 && ramp > 0.0) || 2.0 * (width + ramp) > base.extent[1] {
                    return bad(format!(
                        "bands of width {width} and ramp {ramp} are not neighborhoods of y = 0 and y = {}",
                        base.extent[1]
                    ));
                }
            }
            RegionMask::Collar { width, ramp } => {
                if base.periodic().iter().any(|&p| p) {
                    return bad("collars need a base with boundary".into());
                }
                let short = base.extent[0].min(base.extent[1]);
                if !(width > 0.0 && ramp > 0.0) || 2.0 * (width + ramp) > short {
                    return bad(format!("collar depth {width} + {ramp} too large"));
                }
            }
        }
        Ok(())
    }

    pub fn weight(&self, base: &BaseDomain, p: [f64; 2]) -> f64 {
        self.weight_by(base, p, exp_bump)
    }

    /// Weight with the ramp shaped by `ell` instead of the default bump.
    pub fn weight_by(&self, base: &BaseDomain, p: [f64; 2], ell: impl Fn(f64) -> f64) -> f64 {
        let ell = |u: f64| if u <= 0.0 { 0.0 } else if u >= 1.0 { 1.0 } else { ell(u) };
        match *self {
            RegionMask::Rect { lo, hi, margin } => (0..2)
                .map(|a| {
                    let d = axis_distance(base, a, p[a], lo[a], hi[a]);
                    ell(1.0 - d / margin)
                })
                .product(),
            RegionMask::Bands { width, ramp } => {
                let d = p[1].min(base.extent[1] - p[1]);
                ell((d - width) / ramp)
            }
            RegionMask::Collar { width, ramp } => {
                let d = p[0]
                    .min(base.extent[0] - p[0])
                    .min(p[1])
                    .min(base.extent[1] - p[1]);
                1.0 - ell((d - width) / ramp)
            }
        }
    }

    pub fn node_weight(&self, base: &BaseDomain, i: usize, j: usize) -> f64 {
        self.weight(base, base.node(i, j))
    }

    /// Whether `p` lies in the core, where the weight is 1.
    pub fn in_core(&self, base: &BaseDomain, p: [f64; 2]) -> bool {
        self.weight(base, p) == 1.0
    }

    /// Whether `p` lies in the support of the weight.
    pub fn in_support(&self, base: &BaseDomain, p: [f64; 2]) -> bool {
        self.weight(base, p) > 0.0
    }

    /// Width of the ramp; the weight's gradient scales with its inverse.
    pub fn ramp_width(&self) -> f64 {
        match *self {
            RegionMask::Rect { margin, .. } => margin,
            RegionMask::Bands { ramp, .. } | RegionMask::Collar { ramp, .. } => ramp,
        }
    }
}

/// Distance from `x` to `[lo, hi]` along `axis`, around the circle if periodic.
fn axis_distance(base: &BaseDomain, axis: usize, x: f64, lo: f64, hi: f64) -> f64 {
    if !base.periodic()[axis] {
        return (lo - x).max(x - hi).max(0.0);
    }
    let l = base.extent[axis];
    if hi - lo >= l {
        return 0.0;
    }
    let u = (x - lo).rem_euclid(l);
    if u <= hi - lo {
        0.0
    } else {
        (u - (hi - lo)).min(l - u)
    }
}
