use serde::Serialize;

use super::constraint::{core_path, smooth_with_holonomy_constraint};
use super::interp::smooth_in_t;
use super::local::{damped_cone, default_damping, local_damped_replace};
use super::region::RegionMask;
use crate::decomposition::{
    box_window, grid_index, leaf_index, regular_neighborhood, validate, DecompositionComplex,
    NeighborhoodWidths, RegularNeighborhoodStructure, GLOBAL,
};
use crate::error::{Error, Result};
use crate::foliation::{c0_distance, c0_distance_band, holonomy, BaseShape, LeafFamily, Window};
use crate::kernel::exp_bump;
use crate::tolerance;

/// One region processed by [`globally_smooth`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub stage: String,
    pub region: String,
    /// C0 distance between the family before and after this step, on its window.
    pub achieved: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holonomy_defect: Option<f64>,
    pub retries: usize,
}

/// Result of [`globally_smooth`].
#[derive(Debug, Clone, Serialize)]
pub struct GlobalSmoothing {
    pub scene: DecompositionComplex,
    pub stages: Vec<StageReport>,
    /// C0 distance from the input per box, over the box base and its leaf band.
    pub box_distances: Vec<(String, f64)>,
    /// Change of holonomy along each maximal face core between the end of the
    /// edge stage and the output.
    pub face_defects: Vec<(String, f64)>,
    pub achieved: f64,
    pub epsilon: f64,
    /// Budget passed to the sub-operations in the successful attempt.
    pub internal_epsilon: f64,
    pub retries: usize,
}

impl GlobalSmoothing {
    pub fn face_defect(&self) -> f64 {
        self.face_defects.iter().map(|f| f.1).fold(0.0, f64::max)
    }
}

/// Smooths the global family of `scene` in three stages: the edge squares
/// toward a leaf-direction smoothing, the maximal-face neighbourhoods under
/// a holonomy constraint, then the box interiors by damped coning.
///
/// Each attempt runs the sub-operations with an internal budget, measures
/// per-box distances, and halves the budget while some box exceeds `epsilon`.
pub fn globally_smooth(scene: &DecompositionComplex, epsilon: f64) -> Result<GlobalSmoothing> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be positive")));
    }
    validate(scene).require(&[1, 2, 3, 4, 5])?;
    let input = scene
        .global_family()
        .ok_or_else(|| Error::InvalidFamily("scene has no global family".into()))?;
    if input.base().shape != BaseShape::Torus {
        return Err(Error::BaseMismatch);
    }
    if let Some(b) = scene.boxes.iter().find(|b| b.family.as_deref().is_some_and(|f| f != GLOBAL)) {
        return Err(Error::InvalidFamily(format!(
            "box {} does not use the global family",
            b.id
        )));
    }
    let short = scene
        .boxes
        .iter()
        .flat_map(|b| [b.hi[0] - b.lo[0], b.hi[1] - b.lo[1]])
        .fold(f64::INFINITY, f64::min);
    let widths = NeighborhoodWidths::from_width(short / 5.0);
    let nbhd = regular_neighborhood(scene, widths)?;
    let mut levels: Vec<f64> = scene.boxes.iter().flat_map(|b| b.height).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    let mut internal = 0.5 * epsilon;
    let mut retries = 0;
    loop {
        let run = run_stages(scene, input, &nbhd, &levels, internal)?;
        let mut box_distances = Vec::with_capacity(scene.boxes.len());
        for (i, b) in scene.boxes.iter().enumerate() {
            let d = box_distance(scene, i, input, &run.output).map_err(|e| e.in_stage("measure", &b.id))?;
            box_distances.push((b.id.clone(), d));
        }
        let achieved = box_distances.iter().map(|d| d.1).fold(0.0, f64::max);
        if achieved <= epsilon {
            let mut out = scene.clone();
            out.families.insert(GLOBAL.to_string(), run.output);
            return Ok(GlobalSmoothing {
                scene: out,
                stages: run.stages,
                box_distances,
                face_defects: run.face_defects,
                achieved,
                epsilon,
                internal_epsilon: internal,
                retries,
            });
        }
        if retries == tolerance::RETRY_CAP {
            return Err(Error::BudgetExceeded {
                epsilon,
                achieved,
                retries,
            });
        }
        internal *= 0.5;
        retries += 1;
    }
}

struct StageRun {
    output: LeafFamily,
    stages: Vec<StageReport>,
    face_defects: Vec<(String, f64)>,
}

fn rebuild(like: &LeafFamily, values: Vec<f64>) -> Result<LeafFamily> {
    LeafFamily::new(*like.base(), like.ts().to_vec(), values, like.anchor())
}

/// Window of a maximal face neighbourhood: across the face line in local
/// `x`, along it in local `y`, anchored at the start of the core path.
struct FaceWindow {
    name: String,
    window: Window,
    anchor: [usize; 2],
    bands: RegionMask,
    half: usize,
}

fn face_windows(
    input: &LeafFamily,
    nbhd: &RegularNeighborhoodStructure,
) -> Result<Vec<FaceWindow>> {
    let base = *input.base();
    let (w, e) = (nbhd.widths.face, nbhd.widths.edge);
    nbhd.faces
        .iter()
        .map(|fn_| {
            let f = &nbhd.poset.faces[fn_.face];
            let axis = f.side_axis;
            let along = 1 - axis;
            let name = format!(
                "face {}={} [{}, {}]",
                if axis == 0 { "x" } else { "y" },
                f.position,
                f.span()[0],
                f.span()[1]
            );
            let h_across = base.spacing(axis);
            let h_along = base.spacing(along);
            let half = (w / h_across).floor() as usize;
            let pad = (0.5 * e / h_along).round() as usize;
            if half < 2 || pad < 1 {
                return Err(Error::ResolutionTooLow {
                    got: base.resolution[axis].min(base.resolution[along]),
                    min: (2.0 / w).ceil() as usize,
                }
                .in_stage("faces", &name));
            }
            let c = grid_index(&base, axis, f.position)?;
            let a = grid_index(&base, along, f.span()[0])?;
            let b = grid_index(&base, along, f.span()[1])?;
            let n_across = base.resolution[axis];
            let n_along = base.resolution[along];
            let mut origin = [0; 2];
            origin[axis] = (c + n_across - half) % n_across;
            origin[along] = (a + n_along - pad) % n_along;
            let size = [2 * half + 1, b - a + 2 * pad + 1];
            let window = Window::new(&base, origin, size, axis == 1, BaseShape::Rectangle)?;
            let length = (b - a) as f64 * h_along;
            let bands = RegionMask::Bands {
                width: pad as f64 * h_along,
                ramp: 0.25 * length,
            };
            Ok(FaceWindow {
                name,
                window,
                anchor: [half, 0],
                bands,
                half,
            })
        })
        .collect()
}

fn run_stages(
    scene: &DecompositionComplex,
    input: &LeafFamily,
    nbhd: &RegularNeighborhoodStructure,
    levels: &[f64],
    epsilon: f64,
) -> Result<StageRun> {
    let mut stages = Vec::new();
    let damping = default_damping();

    // edge squares
    let target = smooth_in_t(input, epsilon, levels).map_err(|e| e.in_stage("edges", "global"))?;
    let mut current = input.clone();
    for edge in &nbhd.edges {
        let region = format!("edge ({}, {})", edge.edge.point[0], edge.edge.point[1]);
        let trace = local_damped_replace(&current, &target.family, &edge.mask, &damping)
            .map_err(|e| e.in_stage("edges", &region))?;
        stages.push(StageReport {
            stage: "edges".into(),
            region,
            achieved: trace.report.max_distance,
            holonomy_defect: None,
            retries: target.retries,
        });
        current = trace.into_last();
    }
    let after_edges = current.clone();

    // maximal faces
    let windows = face_windows(input, nbhd)?;
    for fw in &windows {
        let p = fw.window.extract(&current, fw.anchor)?;
        let fixed = local_labels(&current, &p, levels)?;
        let res = smooth_with_holonomy_constraint(&p, &fw.bands, epsilon, &fixed)
            .map_err(|e| e.in_stage("faces", &fw.name))?;
        let mut values = current.values().to_vec();
        let r = fw.half as f64;
        fw.window.write_back(&mut values, &res.family, |i, _| {
            exp_bump(1.0 - (i as f64 - r).abs() / r)
        });
        current = rebuild(&current, values).map_err(|e| e.in_stage("faces", &fw.name))?;
        let written = fw.window.extract(&current, fw.anchor)?;
        let alpha = core_path(&p);
        stages.push(StageReport {
            stage: "faces".into(),
            region: fw.name.clone(),
            achieved: c0_distance(&p, &written)?,
            holonomy_defect: Some(holonomy(&written, &alpha)?.sup_distance(&holonomy(&p, &alpha)?)),
            retries: res.retries,
        });
    }

    // box interiors, one cone per base rectangle
    let ramp_of = |b: &crate::decomposition::FlowBoxSpec| 0.25 * (b.hi[0] - b.lo[0]).min(b.hi[1] - b.lo[1]);
    let mut done: Vec<([f64; 2], [f64; 2])> = Vec::new();
    for b in &scene.boxes {
        if done.contains(&(b.lo, b.hi)) {
            continue;
        }
        done.push((b.lo, b.hi));
        let region = format!("box {}", b.id);
        let window = box_window(current.base(), b, BaseShape::Disk)?;
        let local = window.extract(&current, [0, 0])?;
        let fixed = local_labels(&current, &local, levels)?;
        let collar = RegionMask::Collar {
            width: nbhd.widths.face,
            ramp: ramp_of(b),
        };
        let cone = damped_cone(&local, &local, &collar, epsilon, &fixed)
            .map_err(|e| e.in_stage("interiors", &region))?;
        let mut values = current.values().to_vec();
        window.write_back(&mut values, &cone.family, |_, _| 1.0);
        current = rebuild(&current, values).map_err(|e| e.in_stage("interiors", &region))?;
        stages.push(StageReport {
            stage: "interiors".into(),
            region,
            achieved: cone.achieved,
            holonomy_defect: None,
            retries: cone.interior.retries,
        });
    }

    let mut face_defects = Vec::with_capacity(windows.len());
    for fw in &windows {
        let before = fw.window.extract(&after_edges, fw.anchor)?;
        let after = fw.window.extract(&current, fw.anchor)?;
        let alpha = core_path(&before);
        let d = holonomy(&after, &alpha)?.sup_distance(&holonomy(&before, &alpha)?);
        face_defects.push((fw.name.clone(), d));
    }
    Ok(StageRun {
        output: current,
        stages,
        face_defects,
    })
}

/// Labels in `local` of the leaves of `global` labelled `levels`.
fn local_labels(global: &LeafFamily, local: &LeafFamily, levels: &[f64]) -> Result<Vec<f64>> {
    levels
        .iter()
        .map(|&t| leaf_index(global, t).map(|k| local.ts()[k]))
        .collect()
}

/// C0 distance between `a` and `b` over the base of box `index` and the
/// band of leaves between its bottom and top.
pub fn box_distance(scene: &DecompositionComplex, index: usize, a: &LeafFamily, b: &LeafFamily) -> Result<f64> {
    let bx = &scene.boxes[index];
    let base = *a.base();
    let window = box_window(&base, bx, BaseShape::Rectangle)?;
    let wb = window.base();
    let mut inside = vec![false; base.node_count()];
    for (i, j) in wb.nodes() {
        inside[window.global_node(i, j)] = true;
    }
    let ny = base.ny();
    c0_distance_band(a, b, |i, j| inside[i * ny + j], bx.height)
}
