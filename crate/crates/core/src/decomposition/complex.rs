use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::geometry::{Arc, Cell, SLACK};
use crate::error::{Error, Result};
use crate::foliation::{uniform_ts, BaseDomain, BaseShape, LeafFamily, Window};

pub const SCHEMA_VERSION: u32 = 1;

/// Side of a flow box base rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    West,
    East,
    South,
    North,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::West, Side::East, Side::South, Side::North];

    /// Base axis normal to this side.
    pub fn normal_axis(self) -> usize {
        match self {
            Side::West | Side::East => 0,
            Side::South | Side::North => 1,
        }
    }

    /// Base axis running along this side.
    pub fn span_axis(self) -> usize {
        1 - self.normal_axis()
    }
}

/// Vertical face of a flow box: a rectangle on one side, given by its span
/// along the side and its leaf-coordinate height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub side: Side,
    pub span: Arc,
    pub height: Arc,
}

/// A flow box `D x I`: base rectangle in `T^2`, leaf interval, vertical faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowBoxSpec {
    pub id: String,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub height: Arc,
    pub faces: Vec<Face>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
}

impl FlowBoxSpec {
    /// Box with one face per side.
    pub fn new(id: impl Into<String>, lo: [f64; 2], hi: [f64; 2], height: Arc) -> Self {
        let mut b = Self {
            id: id.into(),
            lo,
            hi,
            height,
            faces: Vec::new(),
            family: None,
        };
        b.faces = Side::ALL
            .iter()
            .map(|&side| Face {
                side,
                span: b.side_span(side),
                height,
            })
            .collect();
        b
    }

    pub fn with_family(mut self, name: impl Into<String>) -> Self {
        self.family = Some(name.into());
        self
    }

    /// Coordinate of the line carrying `side`.
    pub fn side_position(&self, side: Side) -> f64 {
        match side {
            Side::West => self.lo[0],
            Side::East => self.hi[0],
            Side::South => self.lo[1],
            Side::North => self.hi[1],
        }
    }

    pub fn side_span(&self, side: Side) -> Arc {
        let a = side.span_axis();
        [self.lo[a], self.hi[a]]
    }

    pub fn cell(&self) -> Cell {
        Cell::new([
            [self.lo[0], self.hi[0]],
            [self.lo[1], self.hi[1]],
            self.height,
        ])
    }

    pub fn face_cell(&self, face: &Face) -> Cell {
        let c = self.side_position(face.side);
        let mut arcs = [[0.0; 2]; 3];
        arcs[face.side.normal_axis()] = [c, c];
        arcs[face.side.span_axis()] = face.span;
        arcs[2] = face.height;
        Cell::new(arcs)
    }

    /// The two horizontal boundary cells `D x {t_lo}` and `D x {t_hi}`.
    pub fn horizontal_cells(&self) -> [Cell; 2] {
        let d = [[self.lo[0], self.hi[0]], [self.lo[1], self.hi[1]]];
        [
            Cell::new([d[0], d[1], [self.height[0]; 2]]),
            Cell::new([d[0], d[1], [self.height[1]; 2]]),
        ]
    }

    pub fn volume(&self) -> f64 {
        self.cell().measure()
    }
}

/// Ordered flow boxes in `T^3` with a relative region `V` and the leaf
/// families the boxes refer to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionComplex {
    pub schema_version: u32,
    pub kind: SceneKind,
    pub boxes: Vec<FlowBoxSpec>,
    #[serde(default)]
    pub v: Vec<String>,
    #[serde(default)]
    pub families: BTreeMap<String, LeafFamily>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SceneKind {
    Torus,
}

impl DecompositionComplex {
    pub fn new(boxes: Vec<FlowBoxSpec>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: SceneKind::Torus,
            boxes,
            v: Vec::new(),
            families: BTreeMap::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        if c.schema_version != SCHEMA_VERSION {
            return Err(Error::Malformed(format!(
                "unsupported schema version {}",
                c.schema_version
            )));
        }
        for b in &c.boxes {
            if let Some(name) = &b.family {
                if !c.families.contains_key(name) {
                    return Err(Error::Malformed(format!(
                        "box {} refers to unknown family {name}",
                        b.id
                    )));
                }
            }
        }
        for id in &c.v {
            if c.position(id).is_none() {
                return Err(Error::Malformed(format!("V refers to unknown box {id}")));
            }
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.boxes.iter().position(|b| b.id == id)
    }

    pub fn in_v(&self, index: usize) -> bool {
        self.v.contains(&self.boxes[index].id)
    }

    /// Indices of the listed boxes `F_1, ..., F_n`, i.e. those outside `V`.
    pub fn listing(&self) -> Vec<usize> {
        (0..self.boxes.len()).filter(|&i| !self.in_v(i)).collect()
    }

    pub fn v_indices(&self) -> Vec<usize> {
        (0..self.boxes.len()).filter(|&i| self.in_v(i)).collect()
    }

    pub fn volume(&self) -> f64 {
        self.boxes.iter().map(FlowBoxSpec::volume).sum()
    }

    /// Same boxes listed in the order of `ids`.
    pub fn reordered(&self, ids: &[&str]) -> Result<Self> {
        if ids.len() != self.boxes.len() {
            return Err(Error::InvalidParameter("order must list every box once".into()));
        }
        let mut boxes = Vec::with_capacity(ids.len());
        for id in ids {
            let i = self
                .position(id)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown box {id}")))?;
            if boxes.iter().any(|b: &FlowBoxSpec| b.id == *id) {
                return Err(Error::InvalidParameter(format!("box {id} listed twice")));
            }
            boxes.push(self.boxes[i].clone());
        }
        Ok(Self {
            boxes,
            ..self.clone()
        })
    }

    /// The global reference foliation, if attached.
    pub fn global_family(&self) -> Option<&LeafFamily> {
        self.families.get(GLOBAL)
    }

    /// Leaf family of box `index` in its own chart: base the box rectangle,
    /// leaves the global leaves between its bottom and top, rescaled so the
    /// horizontal boundary sits at heights 0 and 1.
    pub fn box_family(&self, index: usize) -> Result<LeafFamily> {
        let b = &self.boxes[index];
        let name = b.family.as_deref().unwrap_or(GLOBAL);
        let global = self
            .families
            .get(name)
            .ok_or_else(|| Error::InvalidFamily(format!("box {} has no family", b.id)))?;
        let window = box_window(global.base(), b, BaseShape::Rectangle)?;
        let local = window.extract(global, [0, 0])?;
        let k_lo = leaf_index(global, b.height[0])?;
        let k_hi = if b.height[1] >= 1.0 - SLACK {
            global.leaf_count() - 1
        } else {
            leaf_index(global, b.height[1])?
        };
        let bottom = local.leaf(k_lo).to_vec();
        let top = local.leaf(k_hi).to_vec();
        let mut values = Vec::with_capacity((k_hi - k_lo + 1) * bottom.len());
        for k in k_lo..=k_hi {
            let leaf = local.leaf(k);
            values.extend(
                leaf.iter()
                    .zip(bottom.iter().zip(&top))
                    .map(|(v, (lo, hi))| (v - lo) / (hi - lo)),
            );
        }
        LeafFamily::from_leaves(*window.base(), values, [0, 0])
    }
}

/// Name under which scenes store the reference foliation.
pub const GLOBAL: &str = "global";

/// Index of the sampled leaf labelled `t`.
pub(crate) fn leaf_index(family: &LeafFamily, t: f64) -> Result<usize> {
    family
        .ts()
        .iter()
        .position(|s| (s - t).abs() <= 1e-9)
        .ok_or_else(|| Error::InvalidFamily(format!("no sampled leaf at height {t}")))
}

/// Global grid index of coordinate `x` on `axis`, which must sit on a node.
pub(crate) fn grid_index(base: &BaseDomain, axis: usize, x: f64) -> Result<usize> {
    let h = base.spacing(axis);
    let i = (x / h).round();
    if (i * h - x).abs() > 1e-9 {
        return Err(Error::InvalidRegion(format!(
            "coordinate {x} is not on the grid of spacing {h}"
        )));
    }
    Ok(i as usize)
}

/// Window of global nodes covering the base rectangle of `b`, both ends included.
pub(crate) fn box_window(base: &BaseDomain, b: &FlowBoxSpec, shape: BaseShape) -> Result<Window> {
    let mut origin = [0; 2];
    let mut size = [0; 2];
    for a in 0..2 {
        let i0 = grid_index(base, a, b.lo[a])?;
        let i1 = grid_index(base, a, b.hi[a])?;
        origin[a] = i0 % base.resolution[a];
        size[a] = i1 - i0 + 1;
    }
    Window::new(base, origin, size, false, shape)
}

/// Reference foliation on `T^3`: `f_t(x, y) = t + shear t (1 - t) sin(2 pi x)`
/// on an `n x n` torus grid with `m + 1` uniformly labelled leaves.
pub fn reference_family(n: usize, m: usize, shear: f64) -> Result<LeafFamily> {
    let base = BaseDomain::unit(BaseShape::Torus, n)?;
    LeafFamily::from_fn(base, uniform_ts(m), [0, 0], |t, x, _| {
        t + shear * t * (1.0 - t) * (TAU * x).sin()
    })
}

/// Height cuts `0 < c_1 < ... < 1` for one base cell `(ix, iy)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightSplit {
    pub cell: [usize; 2],
    pub cuts: Vec<f64>,
}

/// `m x n` grid of boxes over `T^2`, listed row by row (`iy` outer), each
/// cell stacked bottom to top when split in height. Box ids are `b{ix}{iy}`,
/// with a `.{k}` suffix for the pieces of a split cell.
pub fn build_torus_scene(
    m: usize,
    n: usize,
    height_splits: &[HeightSplit],
    family: Option<LeafFamily>,
) -> Result<DecompositionComplex> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("grid must be at least 1 x 1".into()));
    }
    for s in height_splits {
        if s.cell[0] >= m || s.cell[1] >= n {
            return Err(Error::InvalidParameter(format!(
                "height split for cell {:?} outside the {m} x {n} grid",
                s.cell
            )));
        }
        let ok = s.cuts.iter().all(|c| *c > 0.0 && *c < 1.0)
            && s.cuts.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "height cuts {:?} do not tile the leaf circle",
                s.cuts
            )));
        }
        if height_splits.iter().filter(|o| o.cell == s.cell).count() > 1 {
            return Err(Error::InvalidParameter(format!(
                "cell {:?} split twice",
                s.cell
            )));
        }
    }
    if let Some(f) = &family {
        if f.base().shape != BaseShape::Torus {
            return Err(Error::BaseMismatch);
        }
    }
    let mut boxes = Vec::new();
    for iy in 0..n {
        for ix in 0..m {
            let lo = [ix as f64 / m as f64, iy as f64 / n as f64];
            let hi = [(ix + 1) as f64 / m as f64, (iy + 1) as f64 / n as f64];
            let id = format!("b{ix}{iy}");
            let cuts = height_splits
                .iter()
                .find(|s| s.cell == [ix, iy])
                .map(|s| s.cuts.clone())
                .unwrap_or_default();
            if cuts.is_empty() {
                boxes.push(FlowBoxSpec::new(id, lo, hi, [0.0, 1.0]));
            } else {
                let mut levels = vec![0.0];
                levels.extend(&cuts);
                levels.push(1.0);
                for (k, w) in levels.windows(2).enumerate() {
                    boxes.push(FlowBoxSpec::new(format!("{id}.{k}"), lo, hi, [w[0], w[1]]));
                }
            }
        }
    }
    let mut c = DecompositionComplex::new(boxes);
    if let Some(f) = family {
        for b in &mut c.boxes {
            b.family = Some(GLOBAL.to_string());
        }
        c.families.insert(GLOBAL.to_string(), f);
    }
    Ok(c)
}

/// Listing orders of the five-box scene on the 2 x 2 grid with cell `b00`
/// split at height 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitOrder {
    /// Full-height neighbour `b10` listed after the split pieces: fails condition (5).
    NeighbourLast,
    /// Full-height neighbours listed first: passes.
    NeighbourFirst,
}

pub fn split_scene(order: SplitOrder, family: Option<LeafFamily>) -> Result<DecompositionComplex> {
    let c = build_torus_scene(
        2,
        2,
        &[HeightSplit {
            cell: [0, 0],
            cuts: vec![0.5],
        }],
        family,
    )?;
    match order {
        SplitOrder::NeighbourLast => c.reordered(&["b01", "b11", "b00.0", "b00.1", "b10"]),
        SplitOrder::NeighbourFirst => c.reordered(&["b10", "b01", "b11", "b00.0", "b00.1"]),
    }
}
