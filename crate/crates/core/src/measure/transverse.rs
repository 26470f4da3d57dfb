use serde::{Deserialize, Serialize};

use super::spline::{bisect, PchipSpline};
use crate::error::{Error, Result};
use crate::foliation::{holonomy_between, BasePath, LeafFamily};

/// Cumulative function `z -> mu([0, z])` of a measure on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "form")]
pub enum Cumulative {
    /// Piecewise linear through `(z, mu([0, z]))` knots.
    Linear { knots: Vec<(f64, f64)> },
    Spline { spline: PchipSpline },
}

impl Cumulative {
    /// Lebesgue measure.
    pub fn identity() -> Self {
        Cumulative::Linear {
            knots: vec![(0.0, 0.0), (1.0, 1.0)],
        }
    }

    pub fn linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        let c = Cumulative::Linear { knots };
        c.validate()?;
        Ok(c)
    }

    /// Samples `h` at `n + 1` uniform points.
    pub fn sampled(n: usize, h: impl Fn(f64) -> f64) -> Result<Self> {
        Self::linear((0..=n).map(|k| k as f64 / n as f64).map(|z| (z, h(z))).collect())
    }

    /// Strictly increasing from 0 on `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        match self {
            Cumulative::Linear { knots } => {
                if knots.len() < 2 {
                    return Err(Error::Measure("needs at least two knots".into()));
                }
                let (z0, m0) = knots[0];
                let (z1, _) = knots[knots.len() - 1];
                if z0 != 0.0 || z1 != 1.0 || m0 != 0.0 {
                    return Err(Error::Measure("cumulative must start at (0, 0) and end at z = 1".into()));
                }
                if let Some(k) = knots.windows(2).position(|w| !(w[1].0 > w[0].0 && w[1].1 > w[0].1)) {
                    return Err(Error::Measure(format!("not strictly increasing at knot {}", k + 1)));
                }
                Ok(())
            }
            Cumulative::Spline { spline } => {
                let xs = spline.nodes();
                if xs[0] != 0.0 || xs[xs.len() - 1] != 1.0 || spline.values()[0] != 0.0 {
                    return Err(Error::Measure("spline must start at (0, 0) and end at z = 1".into()));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        let z = z.clamp(0.0, 1.0);
        match self {
            Cumulative::Linear { knots } => {
                let k = knots.partition_point(|p| p.0 <= z).saturating_sub(1).min(knots.len() - 2);
                let (a, b) = (knots[k], knots[k + 1]);
                let lam = (z - a.0) / (b.0 - a.0);
                if lam == 0.0 {
                    a.1
                } else if lam == 1.0 {
                    b.1
                } else {
                    a.1 + lam * (b.1 - a.1)
                }
            }
            Cumulative::Spline { spline } => spline.eval(z),
        }
    }

    pub fn total(&self) -> f64 {
        self.eval(1.0)
    }

    /// `z` with `mu([0, z]) = m`.
    pub fn inverse(&self, m: f64) -> f64 {
        match self {
            Cumulative::Linear { knots } => {
                let k = knots.partition_point(|p| p.1 <= m).saturating_sub(1).min(knots.len() - 2);
                let (a, b) = (knots[k], knots[k + 1]);
                let lam = ((m - a.1) / (b.1 - a.1)).clamp(0.0, 1.0);
                if lam == 0.0 {
                    a.0
                } else if lam == 1.0 {
                    b.0
                } else {
                    a.0 + lam * (b.0 - a.0)
                }
            }
            Cumulative::Spline { spline } => spline.inverse(m),
        }
    }

    /// Measure of `[s, t]`.
    pub fn interval(&self, s: f64, t: f64) -> f64 {
        self.eval(t) - self.eval(s)
    }
}

/// How the cumulative function is read on a fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    /// The same function of the height on every fiber.
    Fiber,
    /// A function of the label of the leaf through the point; invariant
    /// under holonomy by construction.
    Leafwise,
}

/// Transverse measure on the fibers of a flow box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransverseMeasure {
    pub kind: MeasureKind,
    pub cumulative: Cumulative,
}

impl TransverseMeasure {
    pub fn new(kind: MeasureKind, cumulative: Cumulative) -> Result<Self> {
        cumulative.validate()?;
        Ok(Self { kind, cumulative })
    }

    pub fn lebesgue() -> Self {
        Self {
            kind: MeasureKind::Fiber,
            cumulative: Cumulative::identity(),
        }
    }

    /// `mu([0, z])` on the fiber over `p`.
    pub fn at_point(&self, family: &LeafFamily, p: [f64; 2], z: f64) -> f64 {
        match self.kind {
            MeasureKind::Fiber => self.cumulative.eval(z),
            MeasureKind::Leafwise => self.cumulative.eval(family.leaf_through_point(p, z)),
        }
    }

    /// `mu([0, z])` on the fiber over node `(i, j)`.
    pub fn at_node(&self, family: &LeafFamily, i: usize, j: usize, z: f64) -> f64 {
        match self.kind {
            MeasureKind::Fiber => self.cumulative.eval(z),
            MeasureKind::Leafwise => self.cumulative.eval(family.leaf_through_node(i, j, z)),
        }
    }

    /// Height over node `(i, j)` with `mu([0, z]) = m`.
    pub fn inverse_at_node(&self, family: &LeafFamily, i: usize, j: usize, m: f64) -> f64 {
        let u = self.cumulative.inverse(m);
        match self.kind {
            MeasureKind::Fiber => u,
            MeasureKind::Leafwise => family.eval_node(u, i, j),
        }
    }

    /// The same measure read leafwise through the fiber over `p`:
    /// `F(t) = mu([0, f_t(p)])`, sampled at the leaves of `family`.
    pub fn leafwise_at(&self, family: &LeafFamily, p: [f64; 2]) -> Result<TransverseMeasure> {
        let knots = family
            .ts()
            .iter()
            .map(|&t| (t, self.at_point(family, p, family.eval(t, p))))
            .collect();
        TransverseMeasure::new(MeasureKind::Leafwise, Cumulative::linear(knots)?)
    }
}

/// Fiber heights at which invariance is sampled.
pub const INVARIANCE_SAMPLES: usize = 128;

/// Sup over `paths` and fiber intervals `[s, t]` of
/// `|mu([s, t]) - mu(rho[s, t])|`, with `rho` the holonomy from the start
/// fiber to the end fiber, sampled at uniform heights.
pub fn verify_invariance(family: &LeafFamily, mu: &TransverseMeasure, paths: &[BasePath]) -> Result<f64> {
    let mut sup = 0.0f64;
    for path in paths {
        path.check_on(family.base())?;
        let (a, b) = (path.start(), path.end());
        let rho = holonomy_between(family, a, b);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..=INVARIANCE_SAMPLES {
            let z = k as f64 / INVARIANCE_SAMPLES as f64;
            let g = mu.at_point(family, a, z) - mu.at_point(family, b, rho.eval(z));
            lo = lo.min(g);
            hi = hi.max(g);
        }
        sup = sup.max(hi - lo);
    }
    Ok(sup)
}

/// Smoothing of a measure along one transversal: `h` is the input
/// cumulative, `g` the monotone spline through its subsamples, and the
/// reparametrization is `f = h^-1 ∘ g`, so the pushed-forward cumulative
/// `h ∘ f` equals `g`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransversalSmoothing {
    pub h: Cumulative,
    pub g: PchipSpline,
}

impl TransversalSmoothing {
    /// `f(t) = h^-1(g(t))`.
    pub fn reparametrize(&self, t: f64) -> f64 {
        let m = self.g.eval(t);
        match &self.h {
            Cumulative::Spline { spline } => bisect(|x| spline.eval(x), m, 0.0, 1.0),
            h => h.inverse(m),
        }
    }

    /// Cumulative function of the smoothed measure, `g`.
    pub fn measure(&self) -> Cumulative {
        Cumulative::Spline { spline: self.g.clone() }
    }

    /// Largest `|h(f(t)) - g(t)|` at the spline nodes.
    pub fn node_residual(&self) -> f64 {
        self.g
            .nodes()
            .iter()
            .map(|&t| (self.h.eval(self.reparametrize(t)) - self.g.eval(t)).abs())
            .fold(0.0, f64::max)
    }
}

pub const MIN_SUBSAMPLES: usize = 4;

/// Replaces the cumulative `mu` on a transversal by the monotone spline
/// through `subsamples + 1` uniform samples of it.
pub fn smooth_measure_on_transversal(mu: &Cumulative, subsamples: usize) -> Result<TransversalSmoothing> {
    if subsamples < MIN_SUBSAMPLES {
        return Err(Error::InvalidParameter(format!(
            "subsample count {subsamples} below {MIN_SUBSAMPLES}"
        )));
    }
    mu.validate()?;
    let xs: Vec<f64> = (0..=subsamples).map(|k| k as f64 / subsamples as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| mu.eval(x)).collect();
    let g = PchipSpline::new(xs, ys)?;
    Ok(TransversalSmoothing { h: mu.clone(), g })
}
