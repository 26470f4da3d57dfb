use serde::{Deserialize, Serialize};

use super::base::BaseDomain;
use super::family::LeafFamily;
use crate::error::{Error, Result};

/// Unit normals of the leaves through a grid of sample points `(x, z)`.
///
/// Heights are uniform levels `z_l = l / (levels - 1)`; normals are stored
/// level-major, then in base node order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentPlaneField {
    pub base: BaseDomain,
    pub levels: usize,
    pub normals: Vec<[f64; 3]>,
}

impl TangentPlaneField {
    pub fn normal(&self, level: usize, i: usize, j: usize) -> [f64; 3] {
        self.normals[level * self.base.node_count() + self.base.index(i, j)]
    }

    pub fn height(&self, level: usize) -> f64 {
        level as f64 / (self.levels - 1) as f64
    }

    /// Smallest vertical component; positive for fields transverse to the fibers.
    pub fn min_vertical(&self) -> f64 {
        self.normals.iter().map(|n| n[2]).fold(f64::INFINITY, f64::min)
    }
}

/// Unit normal of the graph `z = f(x)` from its gradient.
#[inline]
pub fn graph_normal(g: [f64; 2]) -> [f64; 3] {
    let r = (g[0] * g[0] + g[1] * g[1] + 1.0).sqrt();
    [-g[0] / r, -g[1] / r, 1.0 / r]
}

/// Angle between unit vectors, accurate for nearly parallel inputs.
#[inline]
pub fn normal_angle(a: [f64; 3], b: [f64; 3]) -> f64 {
    let c = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let cross = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    cross.atan2(dot)
}

/// Normal at `(node, z)` of the leaf through that point.
pub fn normal_at(family: &LeafFamily, i: usize, j: usize, z: f64) -> [f64; 3] {
    let t = family.leaf_through_node(i, j, z);
    graph_normal(family.gradient(t, i, j))
}

/// Tangent field sampled at as many uniform heights as the family has leaves.
pub fn tangent_field(family: &LeafFamily) -> TangentPlaneField {
    tangent_field_at(family, family.leaf_count())
}

pub fn tangent_field_at(family: &LeafFamily, levels: usize) -> TangentPlaneField {
    let base = *family.base();
    let levels = levels.max(2);
    let mut normals = Vec::with_capacity(levels * base.node_count());
    for l in 0..levels {
        let z = l as f64 / (levels - 1) as f64;
        for (i, j) in base.nodes() {
            normals.push(normal_at(family, i, j, z));
        }
    }
    TangentPlaneField {
        base,
        levels,
        normals,
    }
}

/// Sup angle between leaf normals of `a` and `b` over shared sample points.
pub fn c0_distance(a: &LeafFamily, b: &LeafFamily) -> Result<f64> {
    c0_distance_where(a, b, |_, _| true)
}

/// [`c0_distance`] restricted to base nodes accepted by `mask`.
pub fn c0_distance_where(
    a: &LeafFamily,
    b: &LeafFamily,
    mask: impl Fn(usize, usize) -> bool,
) -> Result<f64> {
    if a.base() != b.base() {
        return Err(Error::BaseMismatch);
    }
    let levels = a.leaf_count().max(b.leaf_count());
    let mut sup = 0.0f64;
    for l in 0..levels {
        let z = l as f64 / (levels - 1) as f64;
        for (i, j) in a.base().nodes() {
            if !mask(i, j) {
                continue;
            }
            let d = normal_angle(normal_at(a, i, j, z), normal_at(b, i, j, z));
            sup = sup.max(d);
        }
    }
    Ok(sup)
}

/// [`c0_distance`] over the nodes accepted by `mask` and the heights between
/// the leaves of `a` labelled `band[0]` and `band[1]`.
pub fn c0_distance_band(
    a: &LeafFamily,
    b: &LeafFamily,
    mask: impl Fn(usize, usize) -> bool,
    band: [f64; 2],
) -> Result<f64> {
    if a.base() != b.base() {
        return Err(Error::BaseMismatch);
    }
    let levels = a.leaf_count().max(b.leaf_count());
    let mut sup = 0.0f64;
    for (i, j) in a.base().nodes() {
        if !mask(i, j) {
            continue;
        }
        let (lo, hi) = (a.eval_node(band[0], i, j), a.eval_node(band[1], i, j));
        for l in 0..levels {
            let z = super::family::mix(lo, hi, l as f64 / (levels - 1) as f64);
            sup = sup.max(normal_angle(normal_at(a, i, j, z), normal_at(b, i, j, z)));
        }
    }
    Ok(sup)
}
