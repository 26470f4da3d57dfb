use serde::Serialize;

use super::interp::{fixed_indices, interpolate_on};
use super::region::RegionMask;
use crate::error::{Error, Result};
use crate::foliation::{c0_distance, holonomy, mix, BasePath, HolonomyMap, LeafFamily};
use crate::kernel::choose_partition_fixed;
use crate::tolerance;

/// Result of [`smooth_with_holonomy_constraint`].
#[derive(Debug, Clone, Serialize)]
pub struct ConstrainedSmoothing {
    pub family: LeafFamily,
    /// The smoothed family `S` before the holonomy correction.
    pub smoothed: LeafFamily,
    /// Fiber correction `rho_S(alpha) o rho_P(alpha)^-1` over `alpha(0)`.
    pub correction: HolonomyMap,
    /// `sup |rho_G(alpha) - rho_P(alpha)|`.
    pub holonomy_defect: f64,
    pub achieved: f64,
    pub retries: usize,
}

/// The core path `{lx / 2} x [0, ly]`.
pub fn core_path(family: &LeafFamily) -> BasePath {
    let base = family.base();
    let x = 0.5 * base.extent[0];
    BasePath::segment_on(base, [x, 0.0], [x, base.extent[1]])
}

/// Smooths `p` away from the horizontal bands while keeping its holonomy
/// along the core path.
///
/// `S` is `p` damped toward its interpolation smoothing off the bands. The
/// output is `g_t = l(y) s_t + (1 - l(y)) s_{h(t)}`, where `l` is the band
/// weight and `h` acts on labels through the fiber over `alpha(0)`. Leaves
/// labelled by `fixed_leaves` are partition leaves, so they are kept.
pub fn smooth_with_holonomy_constraint(
    p: &LeafFamily,
    bands: &RegionMask,
    epsilon: f64,
    fixed_leaves: &[f64],
) -> Result<ConstrainedSmoothing> {
    let base = *p.base();
    if !matches!(bands, RegionMask::Bands { .. }) {
        return Err(Error::InvalidRegion("holonomy constraint needs horizontal bands".into()));
    }
    bands.validate(&base)?;
    let alpha = core_path(p);
    let rho_p = holonomy(p, &alpha)?;
    let weight: Vec<f64> = base.nodes().map(|(i, j)| bands.node_weight(&base, i, j)).collect();
    let ell = |i: usize, j: usize| weight[base.index(i, j)];

    let fixed = fixed_indices(p, fixed_leaves)?;
    let mut partition = choose_partition_fixed(p, epsilon, &fixed)?;
    let mut retries = 0;
    loop {
        let q = interpolate_on(p, &partition)?;
        let s = LeafFamily::blend(p, &q.family, ell)?;
        let correction = holonomy(&s, &alpha)?.compose(&rho_p.inverse());
        let a0 = alpha.start();
        let labels: Vec<f64> = s
            .ts()
            .iter()
            .map(|&t| s.leaf_through_point(a0, correction.eval(s.eval(t, a0))))
            .collect();
        let mut values = Vec::with_capacity(s.values().len());
        for (k, &h) in labels.iter().enumerate() {
            values.extend(base.nodes().map(|(i, j)| {
                mix(s.eval_node(h, i, j), s.value(k, i, j), ell(i, j))
            }));
        }
        let g = LeafFamily::from_leaves(base, values, p.anchor())?;
        let holonomy_defect = holonomy(&g, &alpha)?.sup_distance(&rho_p);
        let achieved = c0_distance(p, &g)?;
        if achieved <= epsilon && holonomy_defect <= tolerance::COMPARISON {
            return Ok(ConstrainedSmoothing {
                family: g,
                smoothed: s,
                correction,
                holonomy_defect,
                achieved,
                retries,
            });
        }
        match partition.refine(p) {
            Some(finer) if retries < tolerance::RETRY_CAP => {
                partition = finer;
                retries += 1;
            }
            _ if holonomy_defect > tolerance::COMPARISON => {
                return Err(Error::HolonomyMismatch {
                    path: 0,
                    defect: holonomy_defect,
                })
            }
            _ => {
                return Err(Error::BudgetExceeded {
                    epsilon,
                    achieved,
                    retries,
                })
            }
        }
    }
}
