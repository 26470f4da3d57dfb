use serde::{Deserialize, Serialize};

use super::complex::{DecompositionComplex, Face, FlowBoxSpec, Side};
use super::geometry::{arc_len, arc_overlaps, union_area, Arc, Cell, SLACK};
use crate::error::{Error, Result};

/// A face named by its box and position in the box's face list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceRef {
    pub box_id: String,
    pub face: usize,
    pub side: Side,
    pub span: Arc,
    pub height: Arc,
}

impl FaceRef {
    fn of(b: &FlowBoxSpec, face: usize) -> Self {
        let f = &b.faces[face];
        Self {
            box_id: b.id.clone(),
            face,
            side: f.side,
            span: f.span,
            height: f.height,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub boxes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub faces: Vec<FaceRef>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: u8,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
}

/// Per-condition outcome of [`validate`] for conditions (1) to (5).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub conditions: Vec<ConditionReport>,
}

impl ValidationReport {
    pub fn passed(&self, condition: u8) -> bool {
        self.conditions
            .iter()
            .find(|c| c.condition == condition)
            .is_some_and(|c| c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn witnesses(&self, condition: u8) -> &[Witness] {
        self.conditions
            .iter()
            .find(|c| c.condition == condition)
            .map_or(&[], |c| &c.witnesses)
    }

    /// Fails with the first witness of the first failing condition among `conditions`.
    pub fn require(&self, conditions: &[u8]) -> Result<()> {
        for c in &self.conditions {
            if conditions.contains(&c.condition) && !c.passed {
                let detail = c
                    .witnesses
                    .first()
                    .map_or_else(String::new, |w| format!("{} ({})", w.detail, w.boxes.join(", ")));
                return Err(Error::Decomposition {
                    condition: c.condition,
                    detail,
                });
            }
        }
        Ok(())
    }
}

/// Checks conditions (1) to (5) and reports witnesses for every failure.
pub fn validate(complex: &DecompositionComplex) -> ValidationReport {
    let checks: [(u8, fn(&DecompositionComplex) -> Vec<Witness>); 5] = [
        (1, condition1),
        (2, condition2),
        (3, condition3),
        (4, condition4),
        (5, condition5),
    ];
    ValidationReport {
        conditions: checks
            .iter()
            .map(|(n, check)| {
                let witnesses = check(complex);
                ConditionReport {
                    condition: *n,
                    passed: witnesses.is_empty(),
                    witnesses,
                }
            })
            .collect(),
    }
}

fn witness(boxes: &[&FlowBoxSpec], detail: impl Into<String>) -> Witness {
    Witness {
        boxes: boxes.iter().map(|b| b.id.clone()).collect(),
        faces: Vec::new(),
        detail: detail.into(),
    }
}

fn condition1(c: &DecompositionComplex) -> Vec<Witness> {
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for b in &c.boxes {
        if !seen.insert(b.id.as_str()) {
            out.push(witness(&[b], "duplicate box id"));
        }
        let base_ok = (0..2).all(|a| {
            b.lo[a].is_finite() && b.hi[a].is_finite() && b.lo[a] < b.hi[a] && b.hi[a] - b.lo[a] <= 1.0 + SLACK
        });
        if !base_ok {
            out.push(witness(&[b], "degenerate base rectangle"));
            continue;
        }
        let [t0, t1] = b.height;
        if !(t0 >= 0.0 && t0 < t1 && t1 <= 1.0) {
            out.push(witness(&[b], format!("height [{t0}, {t1}] is not a leaf interval")));
            continue;
        }
        for side in Side::ALL {
            let faces: Vec<&Face> = b.faces.iter().filter(|f| f.side == side).collect();
            let span = b.side_span(side);
            let mut rects = Vec::new();
            let mut ok = !faces.is_empty();
            for f in &faces {
                let inside = f.span[0] >= span[0] - SLACK
                    && f.span[1] <= span[1] + SLACK
                    && f.span[0] < f.span[1]
                    && f.height[0] >= t0 - SLACK
                    && f.height[1] <= t1 + SLACK
                    && f.height[0] < f.height[1];
                ok &= inside;
                rects.push([f.span, f.height]);
            }
            let total: f64 = rects.iter().map(|r| arc_len(r[0]) * arc_len(r[1])).sum();
            let area = arc_len(span) * (t1 - t0);
            // equal total and union area means no overlaps; equal union and side area means coverage
            ok &= (total - area).abs() <= 1e-12 && (union_area(&rects) - area).abs() <= 1e-12;
            if !ok {
                out.push(witness(&[b], format!("faces do not tile the {side:?} side")));
            }
        }
    }
    out
}

fn component_in_face(b: &FlowBoxSpec, k: &Cell) -> Option<usize> {
    b.faces.iter().position(|f| b.face_cell(f).contains(k))
}

fn component_horizontal(b: &FlowBoxSpec, k: &Cell) -> bool {
    b.horizontal_cells().iter().any(|h| h.contains(k))
}

fn condition2(c: &DecompositionComplex) -> Vec<Witness> {
    let mut out = Vec::new();
    for &i in &c.listing() {
        let b = &c.boxes[i];
        for &j in &c.v_indices() {
            let v = &c.boxes[j];
            for k in b.cell().intersect(&v.cell()) {
                let ok = match k.dimension() {
                    3 => false,
                    2 if component_horizontal(b, &k) => true,
                    2 => {
                        // a union of whole vertical 2-cells of the box
                        let covered: f64 = b
                            .faces
                            .iter()
                            .map(|f| b.face_cell(f))
                            .filter(|f| k.contains(f))
                            .map(|f| planar_area(&f))
                            .sum();
                        (covered - planar_area(&k)).abs() <= 1e-12
                    }
                    _ => component_horizontal(b, &k) || component_in_face(b, &k).is_some(),
                };
                if !ok {
                    out.push(witness(&[b, v], "intersection with V is not a union of cells of the box"));
                }
            }
        }
    }
    out
}

/// Area of a cell with one degenerate axis.
fn planar_area(k: &Cell) -> f64 {
    k.arcs
        .iter()
        .map(|a| arc_len(*a))
        .filter(|l| *l > SLACK)
        .product()
}

fn condition3(c: &DecompositionComplex) -> Vec<Witness> {
    let mut out = Vec::new();
    for i in 0..c.boxes.len() {
        for j in i + 1..c.boxes.len() {
            let (a, b) = (&c.boxes[i], &c.boxes[j]);
            if a.cell().intersect(&b.cell()).iter().any(|k| k.dimension() == 3) {
                out.push(witness(&[a, b], "interiors overlap"));
            }
        }
    }
    out
}

fn condition4(c: &DecompositionComplex) -> Vec<Witness> {
    let mut out = Vec::new();
    let listed = c.listing();
    for (n, &i) in listed.iter().enumerate() {
        for &j in &listed[n + 1..] {
            let (a, b) = (&c.boxes[i], &c.boxes[j]);
            for k in a.cell().intersect(&b.cell()) {
                if k.dimension() == 3 {
                    continue;
                }
                let horizontal = component_horizontal(a, &k) && component_horizontal(b, &k);
                let vertical = component_in_face(a, &k).is_some() && component_in_face(b, &k).is_some();
                if !horizontal && !vertical {
                    out.push(witness(
                        &[a, b],
                        "intersection component lies in neither the horizontal boundaries nor single faces",
                    ));
                }
            }
        }
    }
    out
}

/// Pairs (later face, earlier face) violating condition (5).
pub(crate) fn condition5_violations(c: &DecompositionComplex) -> Vec<(usize, usize, usize, usize)> {
    let listed = c.listing();
    let mut out = Vec::new();
    for (n, &later) in listed.iter().enumerate() {
        let b = &c.boxes[later];
        for (fi, f) in b.faces.iter().enumerate() {
            let delta = b.face_cell(f);
            for &earlier in &listed[..n] {
                let e = &c.boxes[earlier];
                for (fj, g) in e.faces.iter().enumerate() {
                    let other = e.face_cell(g);
                    if delta.interior_meets(&other) && !other.contains(&delta) {
                        out.push((later, fi, earlier, fj));
                    }
                }
            }
        }
    }
    out
}

fn condition5(c: &DecompositionComplex) -> Vec<Witness> {
    condition5_violations(c)
        .into_iter()
        .map(|(later, fi, earlier, fj)| {
            let (a, b) = (&c.boxes[later], &c.boxes[earlier]);
            Witness {
                boxes: vec![a.id.clone(), b.id.clone()],
                faces: vec![FaceRef::of(a, fi), FaceRef::of(b, fj)],
                detail: "face of a later box meets an earlier face without lying inside it".into(),
            }
        })
        .collect()
}

/// Outcome of the condition (6) check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitivityReport {
    pub transitive: bool,
    /// 1-based position in the listing where the check starts.
    pub start: usize,
    /// 1-based listing position and id of the first box without a covered face.
    pub first_failure: Option<(usize, String)>,
}

/// For each listed box `F_i`, checks that `V ∪ F_1 ∪ ... ∪ F_{i-1}` contains a
/// full vertical 2-cell of `F_i`. With `V` empty the check starts at `i = 2`.
pub fn check_transitive(complex: &DecompositionComplex) -> TransitivityReport {
    let listed = complex.listing();
    let mut before: Vec<usize> = complex.v_indices();
    let start = if before.is_empty() { 2 } else { 1 };
    for (n, &i) in listed.iter().enumerate() {
        if n + 1 >= start {
            let b = &complex.boxes[i];
            let covered = b.faces.iter().any(|f| face_covered(complex, b, f, &before));
            if !covered {
                return TransitivityReport {
                    transitive: false,
                    start,
                    first_failure: Some((n + 1, b.id.clone())),
                };
            }
        }
        before.push(i);
    }
    TransitivityReport {
        transitive: true,
        start,
        first_failure: None,
    }
}

fn face_covered(c: &DecompositionComplex, b: &FlowBoxSpec, f: &Face, others: &[usize]) -> bool {
    let delta = b.face_cell(f);
    let span_axis = f.side.span_axis();
    let rects: Vec<[Arc; 2]> = others
        .iter()
        .flat_map(|&o| delta.intersect(&c.boxes[o].cell()))
        .map(|k| [k.arcs[span_axis], k.arcs[2]])
        .collect();
    union_area(&rects) >= arc_len(f.span) * arc_len(f.height) - 1e-12
}

/// Faces of `b` cut along the given span and height cut points.
pub(crate) fn refine_faces(b: &FlowBoxSpec, cuts: &dyn Fn(Side) -> (Vec<f64>, Vec<f64>)) -> Vec<Face> {
    let mut faces = Vec::new();
    for side in Side::ALL {
        let span = b.side_span(side);
        let (mut xs, mut ts) = cuts(side);
        for f in b.faces.iter().filter(|f| f.side == side) {
            xs.extend(f.span);
            ts.extend(f.height);
        }
        xs.extend(span);
        ts.extend(b.height);
        let xs = sorted_cuts(xs, span);
        let ts = sorted_cuts(ts, b.height);
        for x in xs.windows(2) {
            for t in ts.windows(2) {
                faces.push(Face {
                    side,
                    span: [x[0], x[1]],
                    height: [t[0], t[1]],
                });
            }
        }
    }
    faces
}

/// Points of `xs` inside `range`, sorted with near-duplicates merged.
pub(crate) fn sorted_cuts(mut xs: Vec<f64>, range: Arc) -> Vec<f64> {
    xs.retain(|x| *x >= range[0] - SLACK && *x <= range[1] + SLACK);
    xs.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for x in xs {
        let x = x.clamp(range[0], range[1]);
        if out.last().is_none_or(|l| x - l > SLACK) {
            out.push(x);
        }
    }
    if let Some(l) = out.last_mut() {
        *l = range[1];
    }
    out[0] = range[0];
    out
}

/// Cut points on `range` induced by the arc `other`, in the coordinates of `range`.
pub(crate) fn induced_cuts(range: Arc, other: Arc) -> Vec<f64> {
    arc_overlaps(range, other)
        .into_iter()
        .flatten()
        .filter(|x| *x > range[0] + SLACK && *x < range[1] - SLACK)
        .collect()
}
