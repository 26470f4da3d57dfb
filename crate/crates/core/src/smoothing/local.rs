use serde::Serialize;

use super::interp::{smooth_in_t, SmoothedFamily};
use super::region::RegionMask;
use crate::error::{Error, Result};
use crate::foliation::{
    c0_distance, c0_distance_where, holonomy, BaseDomain, BasePath, BaseShape, LeafFamily,
};
use crate::kernel::{make_damping, DampingProfile};
use crate::tolerance;

/// Number of `s`-slices recorded in an [`IsotopyTrace`].
pub const TRACE_SLICES: usize = 5;

/// Fiber-preserving isotopy sampled at `s = 0, 1/4, ..., 1`.
#[derive(Debug, Clone, Serialize)]
pub struct IsotopyTrace {
    pub s: Vec<f64>,
    pub slices: Vec<LeafFamily>,
    pub report: TraceReport,
}

/// Measured and predicted distances of a damped replacement.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceReport {
    /// Largest distance of any slice from the input.
    pub max_distance: f64,
    /// Distance between input and target on the support of the damping.
    pub target_distance: f64,
    /// `max |l'|` divided by the ramp width.
    pub damping_slope: f64,
    /// Largest height gap between matched leaves on the support.
    pub leaf_gap: f64,
    /// `target_distance + atan(damping_slope * leaf_gap)`.
    pub bound: f64,
}

impl IsotopyTrace {
    pub fn last(&self) -> &LeafFamily {
        self.slices.last().expect("trace has slices")
    }

    pub fn into_last(mut self) -> LeafFamily {
        self.slices.pop().expect("trace has slices")
    }
}

/// `h_t^s = (1 - s l(x)) f_t + s l(x) g_t` with `l` the damping of `region`.
///
/// Leaves are matched by their label over the common anchor; when the two
/// families are sampled at different labels both are resampled on the union.
pub fn local_damped_replace(
    f: &LeafFamily,
    g: &LeafFamily,
    region: &RegionMask,
    damping: &DampingProfile,
) -> Result<IsotopyTrace> {
    if f.base() != g.base() || f.anchor() != g.anchor() {
        return Err(Error::BaseMismatch);
    }
    let base = *f.base();
    region.validate(&base)?;
    let (f, g) = common_labels(f, g)?;
    let weights: Vec<f64> = base
        .nodes()
        .map(|(i, j)| region.weight_by(&base, base.node(i, j), |u| damping.value(u)))
        .collect();
    let w = |i: usize, j: usize| weights[base.index(i, j)];
    let s: Vec<f64> = (0..TRACE_SLICES).map(|k| k as f64 / (TRACE_SLICES - 1) as f64).collect();
    let mut slices = Vec::with_capacity(TRACE_SLICES);
    // slices equal `f` off the support, so normals can differ only on nodes
    // whose difference stencil meets it
    let near: Vec<bool> = base
        .nodes()
        .map(|(i, j)| {
            let (xa, xb, _) = base.stencil(0, i);
            let (ya, yb, _) = base.stencil(1, j);
            [(i, j), (xa, j), (xb, j), (i, ya), (i, yb)]
                .iter()
                .any(|&(a, b)| w(a, b) > 0.0)
        })
        .collect();
    let mut max_distance = 0.0f64;
    for &sk in &s {
        let slice = LeafFamily::blend(&f, &g, |i, j| sk * w(i, j))?;
        max_distance = max_distance.max(c0_distance_where(&f, &slice, |i, j| near[base.index(i, j)])?);
        slices.push(slice);
    }
    let support = |i: usize, j: usize| w(i, j) > 0.0;
    let target_distance = c0_distance_where(&f, &g, support)?;
    let n = base.node_count();
    let leaf_gap = f
        .values()
        .iter()
        .zip(g.values())
        .enumerate()
        .filter(|(p, _)| weights[p % n] > 0.0)
        .map(|(_, (a, b))| (a - b).abs())
        .fold(0.0, f64::max);
    let damping_slope = damping.max_derivative() / region.ramp_width();
    Ok(IsotopyTrace {
        s,
        slices,
        report: TraceReport {
            max_distance,
            target_distance,
            damping_slope,
            leaf_gap,
            bound: target_distance + (damping_slope * leaf_gap).atan(),
        },
    })
}

/// Both families sampled on the union of their leaf labels.
fn common_labels(f: &LeafFamily, g: &LeafFamily) -> Result<(LeafFamily, LeafFamily)> {
    if f.ts() == g.ts() {
        return Ok((f.clone(), g.clone()));
    }
    let mut ts: Vec<f64> = f.ts().iter().chain(g.ts()).copied().collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() <= tolerance::FORMULA);
    Ok((resample(f, &ts)?, resample(g, &ts)?))
}

/// `family` evaluated at the labels `ts` with its own interpolation rule.
pub fn resample(family: &LeafFamily, ts: &[f64]) -> Result<LeafFamily> {
    let base = *family.base();
    let mut values = Vec::with_capacity(ts.len() * base.node_count());
    for &t in ts {
        values.extend(base.nodes().map(|(i, j)| family.eval_node(t, i, j)));
    }
    LeafFamily::new(base, ts.to_vec(), values, family.anchor())
}

/// Loops based at the anchor generating the fundamental group of the base.
pub fn generating_loops(base: &BaseDomain, anchor: [usize; 2]) -> Vec<BasePath> {
    let a = base.node(anchor[0], anchor[1]);
    let periodic = base.periodic();
    (0..2)
        .filter(|&axis| periodic[axis])
        .map(|axis| {
            let mut b = a;
            b[axis] += base.extent[axis];
            BasePath::segment_on(base, a, b)
        })
        .collect()
}

/// Damped straight-line isotopy from `f` to `g` on `region`, after checking
/// that their holonomies agree along `paths` (default: generating loops).
///
/// Matching leaves by label, the fiberwise correspondence sends the `f`-leaf
/// through `(x, z)` to the `g`-leaf with the same label.
pub fn straightening_isotopy(
    f: &LeafFamily,
    g: &LeafFamily,
    region: &RegionMask,
    paths: Option<&[BasePath]>,
) -> Result<IsotopyTrace> {
    if f.base() != g.base() || f.anchor() != g.anchor() {
        return Err(Error::BaseMismatch);
    }
    let loops;
    let paths = match paths {
        Some(p) => p,
        None => {
            loops = generating_loops(f.base(), f.anchor());
            &loops
        }
    };
    for (k, path) in paths.iter().enumerate() {
        let defect = holonomy(f, path)?.sup_distance(&holonomy(g, path)?);
        if defect > tolerance::FACE_COMPATIBILITY {
            return Err(Error::HolonomyMismatch { path: k, defect });
        }
    }
    local_damped_replace(f, g, region, &default_damping())
}

pub(crate) fn default_damping() -> DampingProfile {
    make_damping(3, 256).expect("default damping parameters are valid")
}

/// Result of [`damped_cone`].
#[derive(Debug, Clone, Serialize)]
pub struct ConeOutcome {
    pub family: LeafFamily,
    pub interior: SmoothedFamily,
    pub achieved: f64,
    pub trace: TraceReport,
}

/// Smooths a disk box in the leaf direction, then straightens it onto the
/// annular family over the boundary collar.
///
/// `annular` lives on the same base as `disk`; only its values over the
/// support of `collar` are used. `fixed_leaves` are kept as leaves of the
/// interior smoothing.
pub fn damped_cone(
    annular: &LeafFamily,
    disk: &LeafFamily,
    collar: &RegionMask,
    epsilon: f64,
    fixed_leaves: &[f64],
) -> Result<ConeOutcome> {
    if !matches!(collar, RegionMask::Collar { .. }) {
        return Err(Error::InvalidRegion("damped coning needs a collar".into()));
    }
    let interior = smooth_in_t(disk, epsilon, fixed_leaves)?;
    let trace = straightening_isotopy(&interior.family, annular, collar, None)?;
    let report = trace.report;
    let family = trace.into_last();
    let achieved = c0_distance(disk, &family)?;
    Ok(ConeOutcome {
        family,
        interior,
        achieved,
        trace: report,
    })
}

/// Imposes the leaf heights over the anchor's longitude on every longitude.
pub fn x_invariant_normalize(family: &LeafFamily) -> Result<LeafFamily> {
    let base = *family.base();
    if base.shape != BaseShape::Annulus {
        return Err(Error::InvalidParameter("normalization needs an annulus base".into()));
    }
    let i0 = family.anchor()[0];
    let mut values = Vec::with_capacity(family.values().len());
    for k in 0..family.leaf_count() {
        values.extend(base.nodes().map(|(_, j)| family.value(k, i0, j)));
    }
    LeafFamily::new(base, family.ts().to_vec(), values, family.anchor())
}
