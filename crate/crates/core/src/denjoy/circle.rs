use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance;

/// Piecewise-linear lift `h: R -> R` of a circle homeomorphism with
/// `h(x + 1) = h(x) + 1`, given by knots `(x_i, h(x_i))` with `x_i` in
/// `[0, 1)` and extended periodically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleMapLift {
    knots: Vec<(f64, f64)>,
    /// Inserted gaps, for maps produced by [`blowup_circle_map`]; entry
    /// `k + N` is the gap at orbit point `k`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    gaps: Vec<[f64; 2]>,
}

impl CircleMapLift {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidParameter("circle map needs at least one knot".into()));
        }
        for (k, &(x, y)) in knots.iter().enumerate() {
            if !(0.0..1.0).contains(&x) || !y.is_finite() {
                return Err(Error::InvalidParameter(format!("knot {k} ({x}, {y}) out of range")));
            }
            if k > 0 && !(x > knots[k - 1].0 && y > knots[k - 1].1) {
                return Err(Error::InvalidParameter(format!("knots not strictly increasing at {k}")));
            }
        }
        let (x0, y0) = knots[0];
        let (xl, yl) = knots[knots.len() - 1];
        if knots.len() > 1 && !(y0 + 1.0 - yl > 0.0 && x0 + 1.0 - xl > 0.0) {
            return Err(Error::InvalidParameter("lift does not commute with unit translation".into()));
        }
        Ok(Self { knots, gaps: Vec::new() })
    }

    /// Rigid rotation `x -> x + alpha`.
    pub fn rotation(alpha: f64) -> Self {
        Self {
            knots: vec![(0.0, alpha)],
            gaps: Vec::new(),
        }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn gaps(&self) -> &[[f64; 2]] {
        &self.gaps
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = x.floor();
        let r = x - n;
        let m = self.knots.len();
        let i = self.knots.partition_point(|k| k.0 <= r);
        let (a, b) = if i == 0 {
            let (xl, yl) = self.knots[m - 1];
            ((xl - 1.0, yl - 1.0), self.knots[0])
        } else if i == m {
            let (x0, y0) = self.knots[0];
            (self.knots[m - 1], (x0 + 1.0, y0 + 1.0))
        } else {
            (self.knots[i - 1], self.knots[i])
        };
        let lam = (r - a.0) / (b.0 - a.0);
        n + a.1 + lam * (b.1 - a.1)
    }

    /// Lift of the inverse homeomorphism.
    pub fn inverse(&self) -> Self {
        let mut knots: Vec<(f64, f64)> = self
            .knots
            .iter()
            .map(|&(x, y)| {
                let n = y.floor();
                (y - n, x - n)
            })
            .collect();
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { knots, gaps: Vec::new() }
    }

    /// `self ∘ inner`, exact on piecewise-linear lifts.
    pub fn compose(&self, inner: &CircleMapLift) -> Self {
        let inv = inner.inverse();
        let mut xs: Vec<f64> = inner.knots.iter().map(|k| k.0).collect();
        xs.extend(self.knots.iter().map(|k| inv.eval(k.0).rem_euclid(1.0)));
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() <= tolerance::FORMULA);
        let knots = xs.into_iter().map(|x| (x, self.eval(inner.eval(x)))).collect();
        Self { knots, gaps: Vec::new() }
    }

    /// `phi ∘ self ∘ phi^-1`.
    pub fn conjugate(&self, phi: &CircleMapLift) -> Self {
        phi.compose(&self.compose(&phi.inverse()))
    }
}

/// Summable weights for the orbit gaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum WeightRule {
    /// `w_k` proportional to `1 / (k^2 + 1)`, scaled to sum to `total`.
    InverseSquare { total: f64 },
}

impl WeightRule {
    fn weights(&self, n: usize) -> Result<Vec<f64>> {
        match *self {
            WeightRule::InverseSquare { total } => {
                if !(total > 0.0 && total.is_finite()) {
                    return Err(Error::InvalidParameter(format!("total weight {total} must be positive")));
                }
                let n = n as i64;
                let raw: Vec<f64> = (-n..=n).map(|k| 1.0 / ((k * k) as f64 + 1.0)).collect();
                let sum: f64 = raw.iter().sum();
                Ok(raw.into_iter().map(|r| total * r / sum).collect())
            }
        }
    }
}

pub const MIN_ORBIT: usize = 100;

/// Blows up the orbit points `k alpha mod 1`, `|k| <= orbit`, of the
/// rotation by `alpha`: a gap of length `w_k` is inserted at each point,
/// the circle is rescaled to unit length, and each gap is sent affinely
/// onto the next one. Away from the gaps the lift interpolates linearly.
pub fn blowup_circle_map(alpha: f64, orbit: usize, weights: WeightRule) -> Result<CircleMapLift> {
    if orbit < MIN_ORBIT {
        return Err(Error::InvalidParameter(format!("orbit length {orbit} below {MIN_ORBIT}")));
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("rotation parameter {alpha}")));
    }
    let w = weights.weights(orbit)?;
    let n = orbit as i64;
    let theta: Vec<f64> = (-n..=n).map(|k| (k as f64 * alpha).rem_euclid(1.0)).collect();
    let mut order: Vec<usize> = (0..theta.len()).collect();
    order.sort_by(|&a, &b| theta[a].total_cmp(&theta[b]));
    let min_sep = order
        .windows(2)
        .map(|p| theta[p[1]] - theta[p[0]])
        .chain(std::iter::once(theta[order[0]] + 1.0 - theta[order[order.len() - 1]]))
        .fold(f64::INFINITY, f64::min);
    if min_sep <= tolerance::FORMULA {
        return Err(Error::RationalRotation(alpha));
    }
    let scale = 1.0 + w.iter().sum::<f64>();
    let mut gaps = vec![[0.0; 2]; theta.len()];
    let mut before = 0.0;
    for &k in &order {
        let lo = (theta[k] + before) / scale;
        gaps[k] = [lo, lo + w[k] / scale];
        before += w[k];
    }
    // gap k onto gap k + 1 for every k < N, in the domain order
    let mut knots = Vec::with_capacity(2 * theta.len());
    for &k in &order {
        if k + 1 < gaps.len() {
            knots.push((gaps[k][0], gaps[k + 1][0]));
            knots.push((gaps[k][1], gaps[k + 1][1]));
        }
    }
    // lift the images to an increasing sequence
    for i in 1..knots.len() {
        while knots[i].1 <= knots[i - 1].1 {
            knots[i].1 += 1.0;
        }
    }
    let shift = knots[0].1.floor();
    for k in &mut knots {
        k.1 -= shift;
    }
    let mut lift = CircleMapLift::new(knots)?;
    let offset = lift.eval(0.0).floor();
    for k in &mut lift.knots {
        k.1 -= offset;
    }
    lift.gaps = gaps;
    Ok(lift)
}

/// Rotation number estimates from one orbit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationEstimate {
    /// `(h^n(x0) - x0) / n`.
    pub value: f64,
    /// Smoothly weighted Birkhoff average of the displacements.
    pub weighted: f64,
    /// Change of `value` over the last iterate.
    pub last_increment: f64,
    pub iterations: usize,
}

pub const MIN_ITERATIONS: usize = 1000;

/// Running estimate after iterate `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationSample {
    pub iterate: usize,
    /// Orbit point reduced mod 1.
    pub orbit: f64,
    pub estimate: f64,
}

/// Estimates the rotation number of `lift` from the orbit of 0.
pub fn rotation_number(lift: &CircleMapLift, iterations: usize) -> Result<RotationEstimate> {
    rotation_trace(lift, iterations, 0).map(|r| r.0)
}

/// [`rotation_number`] that also records the running estimate every
/// `stride` iterates (never when `stride` is 0).
pub fn rotation_trace(
    lift: &CircleMapLift,
    iterations: usize,
    stride: usize,
) -> Result<(RotationEstimate, Vec<RotationSample>)> {
    if iterations < MIN_ITERATIONS {
        return Err(Error::InvalidParameter(format!(
            "{iterations} iterations below {MIN_ITERATIONS}"
        )));
    }
    let mut x = 0.0f64;
    let mut total = 0.0;
    let mut previous = 0.0;
    let (mut wsum, mut wtotal) = (0.0, 0.0);
    let mut samples = Vec::new();
    for n in 1..=iterations {
        let y = lift.eval(x);
        let d = y - x;
        total += d;
        let t = n as f64 / (iterations + 1) as f64;
        let weight = (-1.0 / (t * (1.0 - t))).exp();
        wsum += weight;
        wtotal += weight * d;
        x = y.rem_euclid(1.0);
        if n == iterations - 1 {
            previous = total / n as f64;
        }
        if stride > 0 && n % stride == 0 {
            samples.push(RotationSample {
                iterate: n,
                orbit: x,
                estimate: total / n as f64,
            });
        }
    }
    let value = total / iterations as f64;
    Ok((
        RotationEstimate {
            value,
            weighted: wtotal / wsum,
            last_increment: (value - previous).abs(),
            iterations,
        },
        samples,
    ))
}

/// Result of following one gap under the lift.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WanderingAudit {
    pub gap: [f64; 2],
    pub iterations: usize,
    /// First iterate whose image meets the gap, if any.
    pub first_return: Option<usize>,
    /// Smallest circle distance between an image and the gap.
    pub min_separation: f64,
}

impl WanderingAudit {
    pub fn wandering(&self) -> bool {
        self.first_return.is_none()
    }
}

/// Follows `gap` (an interval of `[0, 1)`) for `iterations` steps and
/// reports whether an image returns to it.
pub fn wandering_audit(lift: &CircleMapLift, gap: [f64; 2], iterations: usize) -> WanderingAudit {
    let [a, b] = gap;
    let mut lo = a;
    let mut hi = b;
    let mut first_return = None;
    let mut min_separation = f64::INFINITY;
    for m in 1..=iterations {
        let (nlo, nhi) = (lift.eval(lo), lift.eval(hi));
        let shift = nlo.floor();
        lo = nlo - shift;
        hi = nhi - shift;
        // image [lo, hi] against gap [a, b] on the circle
        let sep = [a - hi, lo - b, a + 1.0 - hi, lo - (b + 1.0), a - 1.0 - hi, lo + 1.0 - b]
            .chunks(2)
            .map(|p| p[0].max(p[1]))
            .fold(f64::INFINITY, f64::min);
        if sep <= 0.0 && first_return.is_none() {
            first_return = Some(m);
        }
        min_separation = min_separation.min(sep);
    }
    WanderingAudit {
        gap,
        iterations,
        first_return,
        min_separation,
    }
}
