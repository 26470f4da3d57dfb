use serde::{Deserialize, Serialize};

use super::base::BaseDomain;
use crate::error::{Error, Result};
use crate::tolerance;

/// Almost horizontal product foliation of `D x I`, stored as the graphs
/// `z = f_t(x)` of sampled leaves.
///
/// Leaves are indexed by their height over the anchor node, so `f_t(x0) = t`.
/// Between samples the family is linear in `t`; over the base it is
/// bilinear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily", into = "RawFamily")]
pub struct LeafFamily {
    base: BaseDomain,
    ts: Vec<f64>,
    values: Vec<f64>,
    anchor: [usize; 2],
}

#[derive(Serialize, Deserialize)]
struct RawFamily {
    base: BaseDomain,
    anchor: [usize; 2],
    ts: Vec<f64>,
    leaves: Vec<Vec<f64>>,
}

impl TryFrom<RawFamily> for LeafFamily {
    type Error = Error;
    fn try_from(raw: RawFamily) -> Result<Self> {
        let values = raw.leaves.concat();
        LeafFamily::new(raw.base, raw.ts, values, raw.anchor)
    }
}

impl From<LeafFamily> for RawFamily {
    fn from(f: LeafFamily) -> Self {
        let n = f.base.node_count();
        RawFamily {
            base: f.base,
            anchor: f.anchor,
            leaves: f.values.chunks(n).map(<[f64]>::to_vec).collect(),
            ts: f.ts,
        }
    }
}

impl LeafFamily {
    /// Validates boundary leaves, strict monotonicity and anchoring.
    pub fn new(base: BaseDomain, ts: Vec<f64>, values: Vec<f64>, anchor: [usize; 2]) -> Result<Self> {
        let fam = Self::new_unchecked(base, ts, values, anchor)?;
        fam.validate()?;
        Ok(fam)
    }

    pub(crate) fn new_unchecked(
        base: BaseDomain,
        ts: Vec<f64>,
        values: Vec<f64>,
        anchor: [usize; 2],
    ) -> Result<Self> {
        if ts.len() < 2 {
            return Err(Error::InvalidFamily("need at least two leaves".into()));
        }
        if values.len() != ts.len() * base.node_count() {
            return Err(Error::InvalidFamily(format!(
                "expected {} values, got {}",
                ts.len() * base.node_count(),
                values.len()
            )));
        }
        if anchor[0] >= base.nx() || anchor[1] >= base.ny() {
            return Err(Error::InvalidFamily("anchor outside grid".into()));
        }
        Ok(Self {
            base,
            ts,
            values,
            anchor,
        })
    }

    /// Samples `f(t, x, y)` at every node for each `t` in `ts`.
    pub fn from_fn(
        base: BaseDomain,
        ts: Vec<f64>,
        anchor: [usize; 2],
        f: impl Fn(f64, f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(ts.len() * base.node_count());
        for &t in &ts {
            for (i, j) in base.nodes() {
                let [x, y] = base.node(i, j);
                values.push(f(t, x, y));
            }
        }
        Self::new(base, ts, values, anchor)
    }

    /// Strictly horizontal family `f_t = t` with `m + 1` uniform samples.
    pub fn horizontal(base: BaseDomain, m: usize) -> Result<Self> {
        Self::from_fn(base, uniform_ts(m), [0, 0], |t, _, _| t)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.base.node_count();
        let m = self.ts.len();
        if self.ts[0] != 0.0 || self.ts[m - 1] != 1.0 {
            return Err(Error::InvalidFamily("leaf indices must run from 0 to 1".into()));
        }
        if let Some(k) = (1..m).find(|&k| self.ts[k] <= self.ts[k - 1]) {
            return Err(Error::InvalidFamily(format!("leaf index {k} not increasing")));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidFamily(format!("non-finite value {v}")));
        }
        let bottom = self.leaf(0).iter().map(|v| v.abs()).fold(0.0, f64::max);
        let top = self.leaf(m - 1).iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        if bottom > tolerance::FORMULA || top > tolerance::FORMULA {
            return Err(Error::InvalidFamily(
                "boundary leaves must be f_0 = 0 and f_1 = 1".into(),
            ));
        }
        for k in 1..m {
            let (lo, hi) = (self.leaf(k - 1), self.leaf(k));
            if let Some(node) = (0..n).find(|&p| hi[p] <= lo[p]) {
                return Err(Error::InvalidFamily(format!(
                    "leaves {} and {k} not strictly ordered at node {node}",
                    k - 1
                )));
            }
        }
        let a = self.base.index(self.anchor[0], self.anchor[1]);
        if let Some(k) = (0..m).find(|&k| (self.leaf(k)[a] - self.ts[k]).abs() > tolerance::FORMULA) {
            return Err(Error::InvalidFamily(format!(
                "leaf {k} does not pass through its index over the anchor"
            )));
        }
        Ok(())
    }

    pub fn base(&self) -> &BaseDomain {
        &self.base
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn leaf_count(&self) -> usize {
        self.ts.len()
    }

    pub fn anchor(&self) -> [usize; 2] {
        self.anchor
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn leaf(&self, k: usize) -> &[f64] {
        let n = self.base.node_count();
        &self.values[k * n..(k + 1) * n]
    }

    #[inline]
    pub fn value(&self, k: usize, i: usize, j: usize) -> f64 {
        self.values[k * self.base.node_count() + self.base.index(i, j)]
    }

    /// Heights of all sampled leaves over node `(i, j)`.
    pub fn column(&self, i: usize, j: usize) -> Vec<f64> {
        (0..self.ts.len()).map(|k| self.value(k, i, j)).collect()
    }

    /// Sample interval `[k, k + 1]` containing `t`, with the weight of `k + 1`.
    pub(crate) fn locate_t(&self, t: f64) -> (usize, f64) {
        let m = self.ts.len();
        let t = t.clamp(0.0, 1.0);
        let k = self.ts.partition_point(|&s| s <= t).saturating_sub(1).min(m - 2);
        let lam = (t - self.ts[k]) / (self.ts[k + 1] - self.ts[k]);
        (k, lam)
    }

    /// `f_t` at a grid node.
    pub fn eval_node(&self, t: f64, i: usize, j: usize) -> f64 {
        let (k, lam) = self.locate_t(t);
        mix(self.value(k, i, j), self.value(k + 1, i, j), lam)
    }

    /// Sampled leaf `k` at an arbitrary base point, bilinear in the base.
    pub fn eval_leaf(&self, k: usize, p: [f64; 2]) -> f64 {
        let (i0, i1, a) = self.base.locate(0, p[0]);
        let (j0, j1, b) = self.base.locate(1, p[1]);
        let v = |i, j| self.value(k, i, j);
        mix(mix(v(i0, j0), v(i0, j1), b), mix(v(i1, j0), v(i1, j1), b), a)
    }

    /// `f_t(p)` at an arbitrary base point.
    pub fn eval(&self, t: f64, p: [f64; 2]) -> f64 {
        let (k, lam) = self.locate_t(t);
        if lam == 0.0 {
            return self.eval_leaf(k, p);
        }
        mix(self.eval_leaf(k, p), self.eval_leaf(k + 1, p), lam)
    }

    /// Index of the leaf through height `z` over node `(i, j)`.
    ///
    /// Exact for the interpolation rule: the column is piecewise linear in
    /// `t`, so a binary search over samples followed by one linear solve
    /// inverts it.
    pub fn leaf_through_node(&self, i: usize, j: usize, z: f64) -> f64 {
        let m = self.ts.len();
        let n = self.base.node_count();
        let idx = self.base.index(i, j);
        let col = |k: usize| self.values[k * n + idx];
        invert_column(&self.ts, m, col, z)
    }

    /// Index of the leaf through `(p, z)` for an arbitrary base point.
    pub fn leaf_through_point(&self, p: [f64; 2], z: f64) -> f64 {
        let m = self.ts.len();
        invert_column(&self.ts, m, |k| self.eval_leaf(k, p), z)
    }

    /// Finite-difference gradient of `f_t` at node `(i, j)`.
    pub fn gradient(&self, t: f64, i: usize, j: usize) -> [f64; 2] {
        let (i0, i1, hx) = self.base.stencil(0, i);
        let (j0, j1, hy) = self.base.stencil(1, j);
        [
            (self.eval_node(t, i1, j) - self.eval_node(t, i0, j)) / hx,
            (self.eval_node(t, i, j1) - self.eval_node(t, i, j0)) / hy,
        ]
    }

    /// Gradient of sampled leaf `k` at node `(i, j)`.
    pub fn leaf_gradient(&self, k: usize, i: usize, j: usize) -> [f64; 2] {
        let (i0, i1, hx) = self.base.stencil(0, i);
        let (j0, j1, hy) = self.base.stencil(1, j);
        [
            (self.value(k, i1, j) - self.value(k, i0, j)) / hx,
            (self.value(k, i, j1) - self.value(k, i, j0)) / hy,
        ]
    }

    /// Largest `|f_t(x) - t|` over samples; zero for strictly horizontal families.
    pub fn horizontal_deviation(&self) -> f64 {
        let n = self.base.node_count();
        self.values
            .iter()
            .enumerate()
            .map(|(p, v)| (v - self.ts[p / n]).abs())
            .fold(0.0, f64::max)
    }

    /// Family whose leaf indices are read off the anchor column of `values`.
    pub fn from_leaves(base: BaseDomain, values: Vec<f64>, anchor: [usize; 2]) -> Result<Self> {
        let n = base.node_count();
        if n == 0 || !values.len().is_multiple_of(n) {
            return Err(Error::InvalidFamily("value count is not a multiple of the grid".into()));
        }
        let a = base.index(anchor[0].min(base.nx() - 1), anchor[1].min(base.ny() - 1));
        let ts = values.chunks(n).map(|leaf| leaf[a]).collect();
        Self::new(base, ts, values, anchor)
    }

    /// Leafwise blend `a_k + w(x) (b_k - a_k)`; weights 0 and 1 copy exactly.
    pub fn blend(a: &LeafFamily, b: &LeafFamily, weight: impl Fn(usize, usize) -> f64) -> Result<Self> {
        if a.base != b.base || a.anchor != b.anchor {
            return Err(Error::BaseMismatch);
        }
        if a.ts.len() != b.ts.len() {
            return Err(Error::InvalidFamily("blended families need matching leaf counts".into()));
        }
        let base = a.base;
        let n = base.node_count();
        let w: Vec<f64> = base.nodes().map(|(i, j)| weight(i, j).clamp(0.0, 1.0)).collect();
        let mut values = Vec::with_capacity(a.values.len());
        for k in 0..a.ts.len() {
            let (la, lb) = (a.leaf(k), b.leaf(k));
            values.extend((0..n).map(|p| mix(la[p], lb[p], w[p])));
        }
        if a.ts == b.ts {
            return Self::new(base, a.ts.clone(), values, a.anchor);
        }
        Self::from_leaves(base, values, a.anchor)
    }
}

fn invert_column(ts: &[f64], m: usize, col: impl Fn(usize) -> f64, z: f64) -> f64 {
    if z <= col(0) {
        return 0.0;
    }
    if z >= col(m - 1) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0usize, m - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if col(mid) <= z {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (a, b) = (col(lo), col(hi));
    let lam = (z - a) / (b - a);
    if lam == 0.0 {
        ts[lo]
    } else {
        ts[lo] + lam * (ts[hi] - ts[lo])
    }
}

/// `a + w (b - a)`, exact at `w = 0` and `w = 1`.
#[inline]
pub(crate) fn mix(a: f64, b: f64, w: f64) -> f64 {
    if w == 0.0 {
        a
    } else if w == 1.0 {
        b
    } else {
        a + w * (b - a)
    }
}

/// `m + 1` uniform leaf indices on `[0, 1]`.
pub fn uniform_ts(m: usize) -> Vec<f64> {
    (0..=m).map(|k| k as f64 / m as f64).collect()
}

/// Index of the leaf through `(p, z)`; alias for [`LeafFamily::leaf_through_point`].
pub fn leaf_through(family: &LeafFamily, p: [f64; 2], z: f64) -> f64 {
    family.leaf_through_point(p, z)
}
