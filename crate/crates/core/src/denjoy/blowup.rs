use serde::Serialize;

use super::data::CollapseData;
use crate::decomposition::{
    box_window, grid_index, regular_neighborhood, validate, DecompositionComplex, NeighborhoodWidths,
    RegularNeighborhoodStructure, GLOBAL,
};
use crate::error::{Error, Result};
use crate::foliation::{c0_distance, c0_distance_where, BaseShape, LeafFamily};
use crate::kernel::{InsertionSchedule, Preimage};
use crate::smoothing::{box_distance, StageReport};
use crate::tolerance;

/// Blows up the leaves of a strictly horizontal family at `schedule`,
/// filling each gap with the matching packet. `pi` fixes every leaf in
/// `fixed_leaves`.
pub fn blowup_box(
    family: &LeafFamily,
    schedule: &InsertionSchedule,
    packets: &[LeafFamily],
    fixed_leaves: &[f64],
) -> Result<(LeafFamily, CollapseData)> {
    let deviation = family.horizontal_deviation();
    if deviation > tolerance::FORMULA {
        return Err(Error::NotHorizontal { deviation });
    }
    let data = CollapseData::new(family, schedule, packets, fixed_leaves)?;
    Ok((data.blown_family()?, data))
}

/// Leaves of the global family to blow up, with their weights. Points are
/// global leaf labels; one packet per point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupLocus {
    pub schedule: InsertionSchedule,
}

impl BlowupLocus {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        Ok(Self {
            schedule: InsertionSchedule::new(entries)?,
        })
    }

    pub fn empty() -> Self {
        Self {
            schedule: InsertionSchedule::empty(),
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.schedule.total_weight()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Ok(Self {
            schedule: self.schedule.scaled(factor)?,
        })
    }

    /// Indices of the locus points inside the leaf band of box `index`.
    pub fn box_entries(&self, scene: &DecompositionComplex, index: usize) -> Vec<usize> {
        let h = scene.boxes[index].height;
        (0..self.schedule.len())
            .filter(|&k| {
                let z = self.schedule.entries()[k].0;
                z > h[0] && z < h[1]
            })
            .collect()
    }

    /// The locus in the leaf chart of box `index`.
    pub fn box_schedule(&self, scene: &DecompositionComplex, index: usize) -> Result<InsertionSchedule> {
        let label = box_label(scene, index)?;
        InsertionSchedule::new(
            self.box_entries(scene, index)
                .into_iter()
                .map(|k| {
                    let (z, w) = self.schedule.entries()[k];
                    (label(z), w)
                })
                .collect(),
        )
    }
}

/// Map from global leaf labels to the leaf labels of box `index`, read off
/// at the box's first node.
fn box_label(scene: &DecompositionComplex, index: usize) -> Result<impl Fn(f64) -> f64> {
    let global = global_of(scene)?.clone();
    let b = &scene.boxes[index];
    let window = box_window(global.base(), b, BaseShape::Rectangle)?;
    let ny = global.base().ny();
    let node = window.global_node(0, 0);
    let (i, j) = (node / ny, node % ny);
    let [lo, hi] = [global.eval_node(b.height[0], i, j), global.eval_node(b.height[1], i, j)];
    Ok(move |t: f64| (global.eval_node(t, i, j) - lo) / (hi - lo))
}

fn global_of(scene: &DecompositionComplex) -> Result<&LeafFamily> {
    scene
        .global_family()
        .ok_or_else(|| Error::InvalidFamily("scene has no global family".into()))
}

/// Result of [`blowup_scene`].
#[derive(Debug, Clone, Serialize)]
pub struct BlownScene {
    pub scene: DecompositionComplex,
    #[serde(skip)]
    pub data: CollapseData,
    /// Locus actually used, after any weight halving.
    pub locus: BlowupLocus,
    pub stages: Vec<StageReport>,
    pub box_distances: Vec<(String, f64)>,
    pub achieved: f64,
    pub epsilon: f64,
    pub retries: usize,
}

/// Blows up the global family of `scene` along `locus`.
///
/// The collapse is built in the leaf chart of the global family, cut at
/// every box height so that horizontal box boundaries are fixed. Stage
/// reports measure the change on the edge squares, on the maximal-face
/// neighbourhoods (with the glued holonomy across each face), and per box.
/// Weights are halved while some box moves by more than `epsilon`.
pub fn blowup_scene(
    scene: &DecompositionComplex,
    locus: &BlowupLocus,
    packets: &[LeafFamily],
    epsilon: f64,
) -> Result<BlownScene> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be positive")));
    }
    validate(scene).require(&[1, 2, 3, 4, 5])?;
    let global = global_of(scene)?;
    if let Some(b) = scene.boxes.iter().find(|b| b.family.as_deref().is_some_and(|f| f != GLOBAL)) {
        return Err(Error::InvalidFamily(format!(
            "box {} does not use the global family",
            b.id
        )));
    }
    let levels = box_levels(scene);
    for &(z, _) in locus.schedule.entries() {
        if let Some(b) = scene
            .boxes
            .iter()
            .find(|b| b.height.iter().any(|h| (h - z).abs() <= tolerance::FORMULA))
        {
            return Err(Error::InvalidSchedule(format!(
                "blown-up leaf {z} lies on a horizontal boundary of box {}",
                b.id
            )));
        }
    }
    let short = scene
        .boxes
        .iter()
        .flat_map(|b| [b.hi[0] - b.lo[0], b.hi[1] - b.lo[1]])
        .fold(f64::INFINITY, f64::min);
    let nbhd = regular_neighborhood(scene, NeighborhoodWidths::from_width(short / 5.0))?;

    let mut locus = locus.clone();
    let mut retries = 0;
    loop {
        let data = CollapseData::new(global, &locus.schedule, packets, &levels)?;
        let blown = data.blown_family().map_err(|e| e.in_stage("blowup", "global"))?;
        let mut box_distances = Vec::with_capacity(scene.boxes.len());
        for (i, b) in scene.boxes.iter().enumerate() {
            box_distances.push((b.id.clone(), box_distance(scene, i, global, &blown)?));
        }
        let achieved = box_distances.iter().map(|d| d.1).fold(0.0, f64::max);
        if achieved <= epsilon {
            let stages = stage_reports(scene, global, &blown, &data, &nbhd, &box_distances, retries)?;
            let mut out = scene.clone();
            out.families.insert(GLOBAL.to_string(), blown);
            return Ok(BlownScene {
                scene: out,
                data,
                locus,
                stages,
                box_distances,
                achieved,
                epsilon,
                retries,
            });
        }
        if retries == tolerance::RETRY_CAP || locus.schedule.is_empty() {
            return Err(Error::BudgetExceeded {
                epsilon,
                achieved,
                retries,
            });
        }
        locus = locus.scaled(0.5)?;
        retries += 1;
    }
}

fn box_levels(scene: &DecompositionComplex) -> Vec<f64> {
    let mut levels: Vec<f64> = scene.boxes.iter().flat_map(|b| b.height).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| (*a - *b).abs() <= tolerance::FORMULA);
    levels
}

fn stage_reports(
    scene: &DecompositionComplex,
    global: &LeafFamily,
    blown: &LeafFamily,
    data: &CollapseData,
    nbhd: &RegularNeighborhoodStructure,
    box_distances: &[(String, f64)],
    retries: usize,
) -> Result<Vec<StageReport>> {
    let base = *global.base();
    let mut stages = Vec::new();
    for edge in &nbhd.edges {
        let region = format!("edge ({}, {})", edge.edge.point[0], edge.edge.point[1]);
        stages.push(StageReport {
            stage: "edges".into(),
            region,
            achieved: c0_distance_where(global, blown, |i, j| {
                edge.mask.in_support(&base, base.node(i, j))
            })?,
            holonomy_defect: None,
            retries,
        });
    }
    for fnb in &nbhd.faces {
        let f = &nbhd.poset.faces[fnb.face];
        let axis = f.side_axis;
        let along = 1 - axis;
        let region = format!(
            "face {}={} [{}, {}]",
            if axis == 0 { "x" } else { "y" },
            f.position,
            f.span()[0],
            f.span()[1]
        );
        let mut ends = [[0usize; 2]; 2];
        for (e, s) in f.span().into_iter().enumerate() {
            ends[e][axis] = grid_index(&base, axis, f.position)? % base.resolution[axis];
            ends[e][along] = grid_index(&base, along, s)? % base.resolution[along];
        }
        let defect = glued_holonomy_defect(data, blown, ends, f.height());
        if defect > tolerance::COMPARISON {
            return Err(Error::HolonomyMismatch { path: fnb.face, defect }.in_stage("faces", region));
        }
        stages.push(StageReport {
            stage: "faces".into(),
            region,
            achieved: c0_distance_where(global, blown, |i, j| {
                fnb.mask.in_support(&base, base.node(i, j))
            })?,
            holonomy_defect: Some(defect),
            retries,
        });
    }
    for (b, d) in scene.boxes.iter().zip(box_distances) {
        stages.push(StageReport {
            stage: "interiors".into(),
            region: format!("box {}", b.id),
            achieved: d.1,
            holonomy_defect: None,
            retries,
        });
    }
    Ok(stages)
}

/// Largest difference, over the blown leaves in the band `height`, between
/// the blown family's holonomy from `ends[0]` to `ends[1]` and the glued
/// holonomy: conjugation of the original holonomy by `pi` off the packets,
/// and the packet holonomy transported by `j` inside them.
pub fn glued_holonomy_defect(data: &CollapseData, blown: &LeafFamily, ends: [[usize; 2]; 2], height: [f64; 2]) -> f64 {
    let chart = data.chart();
    let [[i0, j0], [i1, j1]] = ends;
    let mut sup = 0.0f64;
    for k in 0..blown.leaf_count() {
        let z0 = blown.value(k, i0, j0);
        let u = chart.leaf_through_node(i0, j0, z0);
        if u < height[0] - tolerance::FORMULA || u > height[1] + tolerance::FORMULA {
            continue;
        }
        let packet = data
            .packets()
            .iter()
            .position(|e| u > e.gap[0] - tolerance::COMPARISON && u < e.gap[1] + tolerance::COMPARISON);
        let expected = match packet {
            Some(p) => {
                let e = &data.packets()[p];
                let v = (u - e.gap[0]) / (e.gap[1] - e.gap[0]);
                let s = e.packet.leaf_through_node(i0, j0, v.clamp(0.0, 1.0));
                data.inject(p, i1, j1, s)
            }
            None => {
                let t = data.collapse_label(u);
                let z1 = chart.eval_node(t, i1, j1);
                match data.preimage(i1, j1, z1) {
                    Preimage::Point(z) => z,
                    Preimage::Interval(..) => f64::INFINITY,
                }
            }
        };
        sup = sup.max((expected - blown.value(k, i1, j1)).abs());
    }
    sup
}

/// Per-box difference between the restriction of a scene blowup and the
/// independent [`blowup_box`] of the restricted original, at grid nodes.
pub fn box_compatibility(
    original: &DecompositionComplex,
    blown: &BlownScene,
    packets: &[LeafFamily],
) -> Result<Vec<(String, f64)>> {
    let global = global_of(original)?;
    let levels = box_levels(original);
    let mut out = Vec::with_capacity(original.boxes.len());
    for (i, b) in original.boxes.iter().enumerate() {
        let local = original.box_family(i)?;
        let schedule = blown.locus.box_schedule(original, i)?;
        let window = box_window(global.base(), b, BaseShape::Rectangle)?;
        let box_packets = blown
            .locus
            .box_entries(original, i)
            .into_iter()
            .map(|k| window.extract(&packets[k], [0, 0]))
            .collect::<Result<Vec<_>>>()?;
        let label = box_label(original, i)?;
        let fixed: Vec<f64> = levels
            .iter()
            .filter(|&&t| t > b.height[0] && t < b.height[1])
            .map(|&t| label(t))
            .collect();
        let (expected, _) = blowup_box(&local, &schedule, &box_packets, &fixed)
            .map_err(|e| e.in_stage("compatibility", format!("box {}", b.id)))?;
        let restricted = blown.scene.box_family(i)?;
        let d = if expected.leaf_count() != restricted.leaf_count() {
            f64::INFINITY
        } else {
            expected
                .values()
                .iter()
                .zip(restricted.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        out.push((b.id.clone(), d));
    }
    Ok(out)
}

/// C0 distance between the global families of two scenes.
pub fn scene_distance(a: &DecompositionComplex, b: &DecompositionComplex) -> Result<f64> {
    c0_distance(global_of(a)?, global_of(b)?)
}
