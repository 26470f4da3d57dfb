use serde::{Deserialize, Serialize};

use super::base::{BaseDomain, BaseShape};
use super::family::LeafFamily;
use crate::error::{Error, Result};

/// Piecewise-linear increasing homeomorphism of `[0, 1]` given by its knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct HolonomyMap {
    knots: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for HolonomyMap {
    type Error = Error;
    fn try_from(knots: Vec<(f64, f64)>) -> Result<Self> {
        HolonomyMap::from_knots(knots)
    }
}

impl From<HolonomyMap> for Vec<(f64, f64)> {
    fn from(h: HolonomyMap) -> Self {
        h.knots
    }
}

impl HolonomyMap {
    pub fn identity() -> Self {
        Self {
            knots: vec![(0.0, 0.0), (1.0, 1.0)],
        }
    }

    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("holonomy map: {msg}")));
        if knots.len() < 2 {
            return bad("needs at least two knots");
        }
        if knots[0] != (0.0, 0.0) || knots[knots.len() - 1] != (1.0, 1.0) {
            return bad("endpoints must be fixed");
        }
        if knots.windows(2).any(|w| !(w[1].0 > w[0].0 && w[1].1 > w[0].1)) {
            return bad("knots must be strictly increasing");
        }
        Ok(Self { knots })
    }

    /// Samples `f` at `n + 1` uniform points; `f` must be increasing and fix the endpoints.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let knots = (0..=n)
            .map(|k| {
                let x = k as f64 / n as f64;
                (x, if k == 0 { 0.0 } else if k == n { 1.0 } else { f(x) })
            })
            .collect();
        Self::from_knots(knots)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, x: f64) -> f64 {
        eval_pl(&self.knots, x.clamp(0.0, 1.0), false)
    }

    pub fn eval_inverse(&self, y: f64) -> f64 {
        eval_pl(&self.knots, y.clamp(0.0, 1.0), true)
    }

    pub fn inverse(&self) -> Self {
        Self {
            knots: self.knots.iter().map(|&(x, y)| (y, x)).collect(),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &HolonomyMap) -> Self {
        let mut xs: Vec<f64> = inner.knots.iter().map(|k| k.0).collect();
        xs.extend(self.knots.iter().map(|k| inner.eval_inverse(k.0)));
        let knots = merged(xs)
            .into_iter()
            .map(|x| (x, self.eval(inner.eval(x))))
            .collect();
        Self { knots }
    }

    /// Sup of `|self - other|`; exact, since both are piecewise linear.
    pub fn sup_distance(&self, other: &HolonomyMap) -> f64 {
        self.knots
            .iter()
            .chain(other.knots.iter())
            .map(|&(x, _)| (self.eval(x) - other.eval(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|h(x) - other(x)|` over `n + 1` uniform samples.
    pub fn sampled_distance(&self, other: &HolonomyMap, n: usize) -> f64 {
        (0..=n)
            .map(|k| {
                let x = k as f64 / n as f64;
                (self.eval(x) - other.eval(x)).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn distance_from_identity(&self) -> f64 {
        self.sup_distance(&HolonomyMap::identity())
    }
}

fn eval_pl(knots: &[(f64, f64)], x: f64, inverse: bool) -> f64 {
    let key = |k: &(f64, f64)| if inverse { (k.1, k.0) } else { *k };
    let idx = knots.partition_point(|k| key(k).0 <= x);
    if idx == 0 {
        return key(&knots[0]).1;
    }
    if idx == knots.len() {
        return key(&knots[knots.len() - 1]).1;
    }
    let (x0, y0) = key(&knots[idx - 1]);
    let (x1, y1) = key(&knots[idx]);
    if x == x0 {
        return y0;
    }
    y0 + (x - x0) / (x1 - x0) * (y1 - y0)
}

fn merged(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
    if let Some(first) = xs.first_mut() {
        *first = 0.0;
    }
    if let Some(last) = xs.last_mut() {
        *last = 1.0;
    }
    xs
}

/// Sampled path in a base domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasePath {
    pub points: Vec<[f64; 2]>,
}

impl BasePath {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPath("needs at least two samples".into()));
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPath("non-finite coordinate".into()));
        }
        Ok(Self { points })
    }

    /// Straight segment from `a` to `b` with `steps` increments.
    pub fn segment(a: [f64; 2], b: [f64; 2], steps: usize) -> Self {
        let steps = steps.max(1);
        let points = (0..=steps)
            .map(|k| {
                let s = k as f64 / steps as f64;
                [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
            })
            .collect();
        Self { points }
    }

    /// Straight segment sampled finely enough to be continuous on `base`.
    pub fn segment_on(base: &BaseDomain, a: [f64; 2], b: [f64; 2]) -> Self {
        let h = base.spacing(0).min(base.spacing(1));
        let len = (b[0] - a[0]).abs().max((b[1] - a[1]).abs());
        Self::segment(a, b, (len / h).ceil() as usize)
    }

    pub fn start(&self) -> [f64; 2] {
        self.points[0]
    }

    pub fn end(&self) -> [f64; 2] {
        self.points[self.points.len() - 1]
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }

    /// `self` followed by `next`; fails unless `next` starts where `self` ends.
    pub fn concat(&self, next: &BasePath) -> Result<Self> {
        let (e, s) = (self.end(), next.start());
        if (e[0] - s[0]).abs() > 1e-12 || (e[1] - s[1]).abs() > 1e-12 {
            return Err(Error::InvalidPath("paths are not concatenable".into()));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&next.points[1..]);
        Ok(Self { points })
    }

    /// Checks the path stays in `base` and moves at most one cell per step.
    pub fn check_on(&self, base: &BaseDomain) -> Result<()> {
        if let Some(p) = self.points.iter().find(|p| !base.contains(**p)) {
            return Err(Error::InvalidPath(format!("point {p:?} outside base")));
        }
        for (k, w) in self.points.windows(2).enumerate() {
            for axis in 0..2 {
                let mut d = (w[1][axis] - w[0][axis]).abs();
                if base.periodic()[axis] {
                    let l = base.extent[axis];
                    d = d.rem_euclid(l).min(l - d.rem_euclid(l));
                }
                if d > base.spacing(axis) * (1.0 + 1e-9) {
                    return Err(Error::InvalidPath(format!(
                        "step {k} jumps more than one cell"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Holonomy of `family` along `path`: a height on the end fiber goes to the
/// height of the same leaf over the start of the path.
///
/// Product foliations make this depend on the endpoints only, and the map is
/// exactly piecewise linear with knots at the sampled leaves.
pub fn holonomy(family: &LeafFamily, path: &BasePath) -> Result<HolonomyMap> {
    path.check_on(family.base())?;
    Ok(holonomy_between(family, path.end(), path.start()))
}

/// Transfer map from the fiber over `from` to the fiber over `to`.
pub fn holonomy_between(family: &LeafFamily, from: [f64; 2], to: [f64; 2]) -> HolonomyMap {
    let knots = (0..family.leaf_count())
        .map(|k| (family.eval_leaf(k, from), family.eval_leaf(k, to)))
        .collect();
    HolonomyMap { knots }
}

/// Sup over leaves and `(x, x')` of `|f_t(x, y) - f_t(x', y)|`.
pub fn x_invariance_defect(family: &LeafFamily) -> Result<f64> {
    let base = family.base();
    if base.shape != BaseShape::Annulus {
        return Err(Error::InvalidParameter(
            "x-invariance is defined on annulus bases".into(),
        ));
    }
    let mut sup = 0.0f64;
    for k in 0..family.leaf_count() {
        for j in 0..base.ny() {
            let (lo, hi) = (0..base.nx())
                .map(|i| family.value(k, i, j))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            sup = sup.max(hi - lo);
        }
    }
    Ok(sup)
}
