use super::base::{BaseDomain, BaseShape};
use super::family::{mix, LeafFamily};
use crate::error::{Error, Result};

/// Rectangular block of grid nodes of a larger base, wrapping on periodic
/// axes and optionally transposed so that local `x` runs along global `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    base: BaseDomain,
    global: BaseDomain,
    nodes: Vec<usize>,
}

impl Window {
    /// `size` nodes starting at global node `origin`, in local axis order.
    pub fn new(
        global: &BaseDomain,
        origin: [usize; 2],
        size: [usize; 2],
        transpose: bool,
        shape: BaseShape,
    ) -> Result<Self> {
        let (ga, gb) = if transpose { (1, 0) } else { (0, 1) };
        let mut nodes = Vec::with_capacity(size[0] * size[1]);
        for li in 0..size[0] {
            for lj in 0..size[1] {
                let mut g = [0usize; 2];
                g[ga] = origin[ga] + li;
                g[gb] = origin[gb] + lj;
                for a in 0..2 {
                    let n = global.resolution[a];
                    if g[a] >= n {
                        if !global.periodic()[a] {
                            return Err(Error::InvalidRegion("window leaves the base".into()));
                        }
                        g[a] %= n;
                    }
                }
                nodes.push(global.index(g[0], g[1]));
            }
        }
        let extent = [
            (size[0] - 1) as f64 * global.spacing(ga),
            (size[1] - 1) as f64 * global.spacing(gb),
        ];
        let base = BaseDomain::with_min(shape, size, extent, 3)?;
        Ok(Self {
            base,
            global: *global,
            nodes,
        })
    }

    pub fn base(&self) -> &BaseDomain {
        &self.base
    }

    /// Global node index of local node `(i, j)`.
    pub fn global_node(&self, i: usize, j: usize) -> usize {
        self.nodes[self.base.index(i, j)]
    }

    /// Global coordinates of local node `(i, j)`.
    pub fn global_point(&self, i: usize, j: usize) -> [f64; 2] {
        let g = self.global_node(i, j);
        let ny = self.global.ny();
        self.global.node(g / ny, g % ny)
    }

    /// Restriction of `family`, relabelled by heights over local node `anchor`.
    pub fn extract(&self, family: &LeafFamily, anchor: [usize; 2]) -> Result<LeafFamily> {
        if family.base() != &self.global {
            return Err(Error::BaseMismatch);
        }
        let mut values = Vec::with_capacity(family.leaf_count() * self.nodes.len());
        for k in 0..family.leaf_count() {
            let leaf = family.leaf(k);
            values.extend(self.nodes.iter().map(|&g| leaf[g]));
        }
        LeafFamily::from_leaves(self.base, values, anchor)
    }

    /// Writes `local` back into global leaf values, leaf by leaf, blending
    /// with weight `w(i, j)` toward the local values.
    pub fn write_back(&self, global: &mut [f64], local: &LeafFamily, w: impl Fn(usize, usize) -> f64) {
        let n = self.global.node_count();
        for k in 0..local.leaf_count() {
            let leaf = local.leaf(k);
            for (i, j) in self.base.nodes() {
                let p = self.base.index(i, j);
                let g = k * n + self.nodes[p];
                global[g] = mix(global[g], leaf[p], w(i, j));
            }
        }
    }
}
