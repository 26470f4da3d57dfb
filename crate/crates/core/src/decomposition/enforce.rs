use serde::{Deserialize, Serialize};

use super::complex::{DecompositionComplex, Face, FlowBoxSpec};
use super::geometry::{Cell, SLACK};
use super::validate::{induced_cuts, refine_faces, sorted_cuts, validate};
use crate::error::{Error, Result};

/// Audit of [`enforce_condition5`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnforceReport {
    /// Sweeps over the listing until no box needed splitting.
    pub iterations: usize,
    /// `(original id, number of pieces)` for every box that was split or refaced.
    pub splits: Vec<(String, usize)>,
    pub volume_before: f64,
    pub volume_after: f64,
}

/// Subdivides later boxes along the leaves through the horizontal boundary of
/// the earlier vertical cells meeting them, and cuts their faces at the
/// induced vertical edges, until condition (5) holds.
pub fn enforce_condition5(complex: &DecompositionComplex) -> Result<(DecompositionComplex, EnforceReport)> {
    validate(complex).require(&[1, 2, 3, 4])?;
    let mut c = complex.clone();
    let volume_before = c.volume();
    let mut splits = Vec::new();
    let mut iterations = 0;
    let cap = 4 * c.boxes.len().max(1) + 4;
    loop {
        if validate(&c).passed(5) {
            break;
        }
        if iterations == cap {
            return Err(Error::Decomposition {
                condition: 5,
                detail: format!("no fixed point after {cap} sweeps"),
            });
        }
        iterations += 1;
        let mut n = 0;
        while n < c.boxes.len() {
            if c.in_v(n) {
                n += 1;
                continue;
            }
            let earlier: Vec<Cell> = c.listing()
                .into_iter()
                .take_while(|&i| i != n)
                .flat_map(|i| {
                    let b = &c.boxes[i];
                    b.faces.iter().map(|f| b.face_cell(f)).collect::<Vec<_>>()
                })
                .collect();
            let b = &c.boxes[n];
            let meeting: Vec<Cell> = earlier
                .into_iter()
                .filter(|e| b.faces.iter().any(|f| b.face_cell(f).interior_meets(e)))
                .collect();
            let offending = b.faces.iter().any(|f| {
                let d = b.face_cell(f);
                meeting.iter().any(|e| d.interior_meets(e) && !e.contains(&d))
            });
            if !offending {
                n += 1;
                continue;
            }
            let pieces = subdivide(b, &meeting);
            splits.push((b.id.clone(), pieces.len()));
            let count = pieces.len();
            c.boxes.splice(n..=n, pieces);
            n += count;
        }
    }
    let volume_after = c.volume();
    Ok((
        c,
        EnforceReport {
            iterations,
            splits,
            volume_before,
            volume_after,
        },
    ))
}

/// Pieces of `b` cut at the heights of `meeting`, with faces cut at the
/// vertical edges `meeting` induces on each side.
fn subdivide(b: &FlowBoxSpec, meeting: &[Cell]) -> Vec<FlowBoxSpec> {
    let mut levels: Vec<f64> = meeting
        .iter()
        .flat_map(|e| induced_cuts(b.height, e.arcs[2]))
        .collect();
    levels.extend(b.height);
    let levels = sorted_cuts(levels, b.height);
    let single = levels.len() == 2;
    levels
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            let mut piece = b.clone();
            if !single {
                piece.id = format!("{}.{k}", b.id);
            }
            piece.height = [w[0], w[1]];
            piece.faces = b
                .faces
                .iter()
                .filter_map(|f| {
                    let lo = f.height[0].max(w[0]);
                    let hi = f.height[1].min(w[1]);
                    (hi - lo > SLACK).then_some(Face {
                        height: [lo, hi],
                        ..*f
                    })
                })
                .collect();
            let base = piece.clone();
            piece.faces = refine_faces(&base, &|side| {
                let line = base.face_cell(&Face {
                    side,
                    span: base.side_span(side),
                    height: base.height,
                });
                let touching: Vec<&Cell> = meeting.iter().filter(|e| !line.intersect(e).is_empty()).collect();
                let xs = touching
                    .iter()
                    .flat_map(|e| induced_cuts(base.side_span(side), e.arcs[side.span_axis()]))
                    .collect();
                let ts = touching.iter().flat_map(|e| induced_cuts(base.height, e.arcs[2])).collect();
                (xs, ts)
            });
            piece
        })
        .collect()
}
