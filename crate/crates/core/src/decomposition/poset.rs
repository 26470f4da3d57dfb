use serde::{Deserialize, Serialize};

use super::complex::{DecompositionComplex, Side};
use super::geometry::Cell;

/// A geometric vertical face together with the box faces realizing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosetFace {
    pub side_axis: usize,
    pub position: f64,
    pub cell: Cell,
    /// `(box id, face index)` of every box face with this geometry.
    pub incidences: Vec<(String, usize)>,
}

impl PosetFace {
    /// Span along the face line.
    pub fn span(&self) -> [f64; 2] {
        self.cell.arcs[1 - self.side_axis]
    }

    pub fn height(&self) -> [f64; 2] {
        self.cell.arcs[2]
    }
}

/// Vertical faces up to identification, ordered by containment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacePoset {
    pub faces: Vec<PosetFace>,
    /// `below[i]` lists the faces strictly containing face `i`.
    pub below: Vec<Vec<usize>>,
    /// Indices of the maximal faces.
    pub maximal: Vec<usize>,
}

impl FacePoset {
    pub fn is_maximal(&self, i: usize) -> bool {
        self.maximal.contains(&i)
    }

    /// Maximal faces above face `i` (itself when maximal).
    pub fn maximal_above(&self, i: usize) -> Vec<usize> {
        if self.is_maximal(i) {
            return vec![i];
        }
        self.below[i]
            .iter()
            .copied()
            .filter(|&j| self.is_maximal(j))
            .collect()
    }

    /// Whether every face lies below exactly one maximal face.
    pub fn unique_maximal(&self) -> bool {
        (0..self.faces.len()).all(|i| self.maximal_above(i).len() == 1)
    }
}

/// Faces of all boxes, identified when they coincide geometrically, with the
/// containment order; maximal faces sorted by axis, line position, span, height.
pub fn maximal_faces(complex: &DecompositionComplex) -> FacePoset {
    let mut faces: Vec<PosetFace> = Vec::new();
    for b in &complex.boxes {
        for (fi, f) in b.faces.iter().enumerate() {
            let mut cell = b.face_cell(f);
            let axis = f.side.normal_axis();
            let position = b.side_position(f.side).rem_euclid(1.0);
            cell.arcs[axis] = [position; 2];
            let inc = (b.id.clone(), fi);
            match faces.iter_mut().find(|p| p.cell.same(&cell)) {
                Some(p) => p.incidences.push(inc),
                None => faces.push(PosetFace {
                    side_axis: axis,
                    position,
                    cell,
                    incidences: vec![inc],
                }),
            }
        }
    }
    faces.sort_by(|a, b| {
        let key = |p: &PosetFace| (p.side_axis, p.position, p.span()[0], p.height()[0]);
        let (ka, kb) = (key(a), key(b));
        ka.0.cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then(ka.2.total_cmp(&kb.2))
            .then(ka.3.total_cmp(&kb.3))
    });
    let below: Vec<Vec<usize>> = (0..faces.len())
        .map(|i| {
            (0..faces.len())
                .filter(|&j| j != i && faces[j].cell.contains(&faces[i].cell) && !faces[i].cell.contains(&faces[j].cell))
                .collect()
        })
        .collect();
    let maximal = (0..faces.len()).filter(|&i| below[i].is_empty()).collect();
    FacePoset {
        faces,
        below,
        maximal,
    }
}

/// Side label of a poset face's line, for reporting.
pub fn axis_name(axis: usize) -> &'static str {
    if axis == Side::West.normal_axis() {
        "x"
    } else {
        "y"
    }
}
