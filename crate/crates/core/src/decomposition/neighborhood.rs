use serde::{Deserialize, Serialize};

use super::complex::DecompositionComplex;
use super::geometry::{arc_contains, circle_distance, Arc, Cell, SLACK};
use super::poset::{maximal_faces, FacePoset};
use crate::error::{Error, Result};
use crate::smoothing::RegionMask;

/// Half-widths of the face and vertical-edge neighbourhoods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodWidths {
    /// Half-width of `N(sigma)` across the face.
    pub face: f64,
    /// Half-side of the square around each vertical edge.
    pub edge: f64,
}

impl NeighborhoodWidths {
    /// Face half-width `w` with edge squares of half-side `1.5 w`.
    pub fn from_width(w: f64) -> Self {
        Self { face: w, edge: 1.5 * w }
    }
}

/// A vertical edge `{p} x height` where maximal faces end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerticalEdge {
    pub point: [f64; 2],
    pub height: Arc,
}

/// Neighbourhood of a maximal face: the face thickened across by the face
/// width and extended along its line by half the edge width at each end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceNeighborhood {
    /// Index into the poset's faces.
    pub face: usize,
    pub cell: Cell,
    pub mask: RegionMask,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeNeighborhood {
    pub edge: VerticalEdge,
    pub cell: Cell,
    pub mask: RegionMask,
}

/// `N = N_v ∪ N(sigma_1) ∪ ... ∪ N(sigma_m)` with its derived base masks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularNeighborhoodStructure {
    pub widths: NeighborhoodWidths,
    pub poset: FacePoset,
    pub edges: Vec<EdgeNeighborhood>,
    pub faces: Vec<FaceNeighborhood>,
}

/// Builds edge and face neighbourhoods around the maximal faces and checks
/// that edge squares are disjoint and that distinct face neighbourhoods meet
/// only inside the interior of `N_v`.
pub fn regular_neighborhood(
    complex: &DecompositionComplex,
    widths: NeighborhoodWidths,
) -> Result<RegularNeighborhoodStructure> {
    let (w, e) = (widths.face, widths.edge);
    if !(w > 0.0 && e > w && w.is_finite() && e.is_finite()) {
        return Err(Error::Neighborhood(format!(
            "widths must satisfy 0 < face ({w}) < edge ({e})"
        )));
    }
    let poset = maximal_faces(complex);
    let mut edges: Vec<VerticalEdge> = Vec::new();
    for &m in &poset.maximal {
        let f = &poset.faces[m];
        let axis = f.side_axis;
        for end in f.span() {
            let mut point = [0.0; 2];
            point[axis] = f.position;
            point[1 - axis] = end.rem_euclid(1.0);
            let h = f.height();
            match edges.iter_mut().find(|v| {
                circle_distance(v.point[0], point[0]) <= SLACK && circle_distance(v.point[1], point[1]) <= SLACK
            }) {
                Some(v) => v.height = [v.height[0].min(h[0]), v.height[1].max(h[1])],
                None => edges.push(VerticalEdge { point, height: h }),
            }
        }
    }
    let edges: Vec<EdgeNeighborhood> = edges
        .into_iter()
        .map(|v| {
            let cell = Cell::new([
                [v.point[0] - e, v.point[0] + e],
                [v.point[1] - e, v.point[1] + e],
                v.height,
            ]);
            let mask = RegionMask::Rect {
                lo: v.point,
                hi: v.point,
                margin: e,
            };
            EdgeNeighborhood { edge: v, cell, mask }
        })
        .collect();
    for (a, ea) in edges.iter().enumerate() {
        for eb in &edges[a + 1..] {
            if ea.cell.intersect(&eb.cell).iter().any(|k| k.dimension() == 3) {
                return Err(Error::Neighborhood(format!(
                    "edge neighbourhoods around {:?} and {:?} overlap",
                    ea.edge.point, eb.edge.point
                )));
            }
        }
    }
    let faces: Vec<FaceNeighborhood> = poset
        .maximal
        .iter()
        .map(|&m| {
            let f = &poset.faces[m];
            let axis = f.side_axis;
            let span = f.span();
            let mut arcs = [[0.0; 2]; 3];
            arcs[axis] = [f.position - w, f.position + w];
            arcs[1 - axis] = at_most_circle([span[0] - e / 2.0, span[1] + e / 2.0]);
            arcs[2] = f.height();
            let mut lo = [0.0; 2];
            let mut hi = [0.0; 2];
            lo[axis] = f.position;
            hi[axis] = f.position;
            lo[1 - axis] = span[0] - e / 2.0;
            hi[1 - axis] = span[1] + e / 2.0;
            FaceNeighborhood {
                face: m,
                cell: Cell::new(arcs),
                mask: RegionMask::Rect { lo, hi, margin: w },
            }
        })
        .collect();
    let strict = |outer: &Cell, inner: &Cell| {
        (0..2).all(|a| {
            let o = outer.arcs[a];
            arc_contains([o[0] + SLACK, o[1] - SLACK], inner.arcs[a])
        }) && arc_contains(outer.arcs[2], inner.arcs[2])
    };
    for (a, fa) in faces.iter().enumerate() {
        for fb in &faces[a + 1..] {
            for k in fa.cell.intersect(&fb.cell) {
                if k.dimension() < 3 {
                    continue;
                }
                if !edges.iter().any(|v| strict(&v.cell, &k)) {
                    let (pa, pb) = (&poset.faces[fa.face], &poset.faces[fb.face]);
                    return Err(Error::Neighborhood(format!(
                        "neighbourhoods of faces {}={} span {:?} and {}={} span {:?} meet outside N_v",
                        super::poset::axis_name(pa.side_axis),
                        pa.position,
                        pa.span(),
                        super::poset::axis_name(pb.side_axis),
                        pb.position,
                        pb.span(),
                    )));
                }
            }
        }
    }
    Ok(RegularNeighborhoodStructure {
        widths,
        poset,
        edges,
        faces,
    })
}

/// Arcs longer than the circle are the whole circle.
fn at_most_circle(a: Arc) -> Arc {
    if a[1] - a[0] >= 1.0 {
        [a[0], a[0] + 1.0]
    } else {
        a
    }
}
