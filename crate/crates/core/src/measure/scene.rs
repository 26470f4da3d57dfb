use serde::Serialize;

use super::transverse::{
    smooth_measure_on_transversal, verify_invariance, MeasureKind, TransversalSmoothing, TransverseMeasure,
};
use crate::decomposition::{maximal_faces, validate, DecompositionComplex};
use crate::error::{Error, Result};
use crate::foliation::{holonomy_between, BasePath, LeafFamily};
use crate::smoothing::StageReport;

/// Invariance required of the input measure.
pub const INPUT_INVARIANCE: f64 = 1e-6;

/// Result of [`smooth_measured_scene`].
#[derive(Debug, Clone, Serialize)]
pub struct MeasuredSmoothing {
    /// The scene, leaves untouched.
    pub scene: DecompositionComplex,
    pub measure: TransverseMeasure,
    /// Smoothing on the reference transversal.
    pub transversal: TransversalSmoothing,
    pub reference: [f64; 2],
    pub stages: Vec<StageReport>,
    pub invariance_before: f64,
    pub invariance_after: f64,
    /// Largest `|mu'([0, z]) - g(t)|` at the spline nodes over every
    /// vertical edge fiber.
    pub spline_residual: f64,
    /// Largest difference between the face holonomy and the conjugate of
    /// the identity by the smoothed cumulative functions.
    pub holonomy_defect: f64,
    /// Largest difference, over box nodes and spline nodes, between the
    /// measure extended by fiber pushforward from the reference fiber and
    /// the output measure.
    pub extension_residual: f64,
}

/// Paths used to certify invariance: every maximal face span, then each
/// box's diagonal and the segment from its first corner to its centre.
pub fn scene_paths(scene: &DecompositionComplex, family: &LeafFamily) -> Vec<BasePath> {
    let base = family.base();
    let poset = maximal_faces(scene);
    let mut paths = Vec::new();
    for &m in &poset.maximal {
        let f = &poset.faces[m];
        let axis = f.side_axis;
        let [s0, s1] = f.span();
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        a[axis] = f.position.rem_euclid(1.0);
        b[axis] = a[axis];
        a[1 - axis] = s0;
        b[1 - axis] = s1;
        paths.push(BasePath::segment_on(base, a, b));
    }
    for bx in &scene.boxes {
        let centre = [0.5 * (bx.lo[0] + bx.hi[0]), 0.5 * (bx.lo[1] + bx.hi[1])];
        paths.push(BasePath::segment_on(base, bx.lo, bx.hi));
        paths.push(BasePath::segment_on(base, bx.lo, centre));
    }
    paths
}

/// Smooths the transverse measure of a measured scene.
///
/// The measure is read leafwise through the fiber over the first box
/// corner, its cumulative is replaced by the monotone spline through
/// `subsamples + 1` samples, and the result is transported to every fiber
/// by the holonomy. Stage reports record the vertical edges (spline
/// residual), the maximal faces (holonomy versus the measure conjugate of
/// the identity) and the box interiors (pushforward residual).
pub fn smooth_measured_scene(
    scene: &DecompositionComplex,
    mu: &TransverseMeasure,
    subsamples: usize,
) -> Result<MeasuredSmoothing> {
    validate(scene).require(&[1, 2, 3, 4, 5])?;
    let family = scene
        .global_family()
        .ok_or_else(|| Error::InvalidFamily("scene has no global family".into()))?;
    let paths = scene_paths(scene, family);
    let before = verify_invariance(family, mu, &paths)?;
    if before > INPUT_INVARIANCE {
        return Err(Error::Measure(format!(
            "input measure is not invariant (defect {before:.3e} > {INPUT_INVARIANCE:.0e})"
        )));
    }
    let reference = scene.boxes.first().map(|b| b.lo).unwrap_or([0.0; 2]);
    let leafwise = mu.leafwise_at(family, reference)?;
    let transversal = smooth_measure_on_transversal(&leafwise.cumulative, subsamples)?;
    let out = TransverseMeasure::new(MeasureKind::Leafwise, transversal.measure())?;
    let nodes = transversal.g.nodes().to_vec();
    let mut stages = Vec::new();

    // vertical edges: the box corners
    let mut corners: Vec<[f64; 2]> = Vec::new();
    for b in &scene.boxes {
        for c in [b.lo, [b.hi[0], b.lo[1]], [b.lo[0], b.hi[1]], b.hi] {
            let c = [c[0].rem_euclid(1.0), c[1].rem_euclid(1.0)];
            if !corners.iter().any(|d| (d[0] - c[0]).abs() < 1e-12 && (d[1] - c[1]).abs() < 1e-12) {
                corners.push(c);
            }
        }
    }
    let mut spline_residual = transversal.node_residual();
    for c in &corners {
        let r = nodes
            .iter()
            .map(|&t| (out.at_point(family, *c, family.eval(t, *c)) - transversal.g.eval(t)).abs())
            .fold(0.0, f64::max);
        spline_residual = spline_residual.max(r);
        stages.push(StageReport {
            stage: "edges".into(),
            region: format!("edge ({}, {})", c[0], c[1]),
            achieved: r,
            holonomy_defect: None,
            retries: 0,
        });
    }

    // maximal faces: holonomy against mu'_b^-1 ∘ mu'_a
    let mut holonomy_defect = 0.0f64;
    for path in paths.iter().take(paths.len() - 2 * scene.boxes.len()) {
        let (a, b) = (path.start(), path.end());
        let rho = holonomy_between(family, a, b);
        let d = (0..=64)
            .map(|k| {
                let z = k as f64 / 64.0;
                let m = out.at_point(family, a, z);
                let t = out.cumulative.inverse(m);
                (family.eval(t, b) - rho.eval(z)).abs()
            })
            .fold(0.0, f64::max);
        holonomy_defect = holonomy_defect.max(d);
        stages.push(StageReport {
            stage: "faces".into(),
            region: format!("face [{:?} -> {:?}]", a, b),
            achieved: d,
            holonomy_defect: Some(d),
            retries: 0,
        });
    }

    // interiors: pushforward of the reference fiber against the output
    let base = *family.base();
    let mut extension_residual = 0.0f64;
    for (index, b) in scene.boxes.iter().enumerate() {
        let mut r = 0.0f64;
        for (i, j) in base.nodes() {
            let p = base.node(i, j);
            if !inside(b.lo, b.hi, p) {
                continue;
            }
            let rho = holonomy_between(family, reference, p);
            for &t in &nodes {
                let z_ref = family.eval(t, reference);
                let pushed = out.at_point(family, reference, z_ref);
                r = r.max((out.at_node(family, i, j, rho.eval(z_ref)) - pushed).abs());
            }
        }
        extension_residual = extension_residual.max(r);
        stages.push(StageReport {
            stage: "interiors".into(),
            region: format!("box {}", scene.boxes[index].id),
            achieved: r,
            holonomy_defect: None,
            retries: 0,
        });
    }

    let after = verify_invariance(family, &out, &paths)?;
    Ok(MeasuredSmoothing {
        scene: scene.clone(),
        measure: out,
        transversal,
        reference,
        stages,
        invariance_before: before,
        invariance_after: after,
        spline_residual,
        holonomy_defect,
        extension_residual,
    })
}

fn inside(lo: [f64; 2], hi: [f64; 2], p: [f64; 2]) -> bool {
    (0..2).all(|a| p[a] >= lo[a] - 1e-12 && p[a] <= hi[a] + 1e-12)
}
