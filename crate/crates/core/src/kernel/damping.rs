//! Flat damping profiles built from the bump `e(x) = exp(-1/x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance;

/// Formula that generated a [`DampingProfile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DampingKind {
    /// `l(x) = e(x) / (e(x) + e(1 - x))` with `e(x) = exp(-1/x)`.
    ExpBump,
}

/// A smooth monotone bijection of `[0, 1]` that is flat at both endpoints.
///
/// The closed form is authoritative; `samples` are kept for the
/// finite-difference flatness diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DampingProfile {
    samples: Vec<(f64, f64)>,
    flat_order: usize,
    kind: DampingKind,
}

pub const MIN_RESOLUTION: usize = 16;

/// Builds the standard exp-bump damping profile sampled at `resolution + 1` points.
pub fn make_damping(flat_order: usize, resolution: usize) -> Result<DampingProfile> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::ResolutionTooLow {
            got: resolution,
            min: MIN_RESOLUTION,
        });
    }
    if flat_order == 0 {
        return Err(Error::InvalidParameter("flat order must be positive".into()));
    }
    let samples = (0..=resolution)
        .map(|k| {
            let u = k as f64 / resolution as f64;
            (u, exp_bump(u))
        })
        .collect();
    let profile = DampingProfile {
        samples,
        flat_order,
        kind: DampingKind::ExpBump,
    };
    let worst = profile.endpoint_derivatives().into_iter().fold(0.0, f64::max);
    if worst >= tolerance::FLATNESS {
        return Err(Error::InvalidParameter(format!(
            "flat order {flat_order} not resolvable at resolution {resolution} \
             (endpoint derivative {worst:.3e})"
        )));
    }
    Ok(profile)
}

/// `exp(-1/x) / (exp(-1/x) + exp(-1/(1-x)))`, clamped outside `(0, 1)`.
pub fn exp_bump(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        1.0 / (1.0 + (1.0 / u - 1.0 / (1.0 - u)).exp())
    }
}

/// Derivative of [`exp_bump`].
pub fn exp_bump_derivative(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let l = exp_bump(u);
    l * (1.0 - l) * (1.0 / (u * u) + 1.0 / ((1.0 - u) * (1.0 - u)))
}

/// Inverse of [`exp_bump`] in closed form.
///
/// `l(u) = y` reduces to `c u^2 - (c + 2) u + 1 = 0` with `c = ln((1 - y) / y)`;
/// the root in `(0, 1)` is `2 / (2 + c + sqrt(c^2 + 4))`.
pub fn exp_bump_inverse(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    let c = ((1.0 - y) / y).ln();
    let root = (c * c + 4.0).sqrt();
    // c + sqrt(c^2 + 4) without cancellation for negative c
    let s = if c >= 0.0 { c + root } else { 4.0 / (root - c) };
    2.0 / (2.0 + s)
}

impl DampingProfile {
    pub fn value(&self, u: f64) -> f64 {
        match self.kind {
            DampingKind::ExpBump => exp_bump(u),
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match self.kind {
            DampingKind::ExpBump => exp_bump_derivative(u),
        }
    }

    pub fn inverse(&self, y: f64) -> f64 {
        match self.kind {
            DampingKind::ExpBump => exp_bump_inverse(y),
        }
    }

    /// Maximum of `|l'|` over `[0, 1]`; attained at `1/2` for the exp bump.
    pub fn max_derivative(&self) -> f64 {
        match self.kind {
            DampingKind::ExpBump => exp_bump_derivative(0.5),
        }
    }

    pub fn flat_order(&self) -> usize {
        self.flat_order
    }

    pub fn kind(&self) -> DampingKind {
        self.kind
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Magnitudes of the forward (at 0) and backward (at 1) finite-difference
    /// derivatives of orders `1..=flat_order`, computed on the samples.
    pub fn endpoint_derivatives(&self) -> Vec<f64> {
        let n = self.samples.len() - 1;
        let h = 1.0 / n as f64;
        let mut out = Vec::with_capacity(2 * self.flat_order);
        for order in 1..=self.flat_order.min(n) {
            let mut front = 0.0;
            let mut back = 0.0;
            for j in 0..=order {
                let coeff = binomial(order, j) * if (order - j) % 2 == 0 { 1.0 } else { -1.0 };
                front += coeff * self.samples[j].1;
                back += coeff * self.samples[n - order + j].1;
            }
            let scale = h.powi(order as i32);
            out.push((front / scale).abs());
            out.push((back / scale).abs());
        }
        out
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_midpoint() {
        let p = make_damping(3, 256).unwrap();
        assert_eq!(p.value(0.0), 0.0);
        assert_eq!(p.value(1.0), 1.0);
        assert_eq!(p.value(0.5), 0.5);
    }

    #[test]
    fn low_resolution_rejected() {
        assert_eq!(
            make_damping(3, 8),
            Err(Error::ResolutionTooLow { got: 8, min: 16 })
        );
    }

    #[test]
    fn unresolvable_flatness_rejected() {
        assert!(make_damping(12, 16).is_err());
    }

    #[test]
    fn flat_at_endpoints_by_independent_differences() {
        // oracle: plain difference quotients on the closed form
        let h = 1.0 / 256.0;
        let l = |u: f64| {
            if u <= 0.0 {
                0.0
            } else {
                let e = |x: f64| (-1.0 / x).exp();
                e(u) / (e(u) + e(1.0 - u))
            }
        };
        let d1 = (l(h) - l(0.0)) / h;
        let d2 = (l(2.0 * h) - 2.0 * l(h) + l(0.0)) / (h * h);
        let d3 = (l(3.0 * h) - 3.0 * l(2.0 * h) + 3.0 * l(h) - l(0.0)) / (h * h * h);
        for d in [d1, d2, d3] {
            assert!(d.abs() < 1e-9, "{d}");
        }
        let p = make_damping(3, 256).unwrap();
        assert!(p.endpoint_derivatives().iter().all(|d| *d < 1e-9));
    }

    #[test]
    fn inverse_round_trips() {
        for k in 1..1000 {
            let u = k as f64 / 1000.0;
            let y = exp_bump(u);
            // Near 1 the rounding of y itself dominates.
            if y > 1e-300 && y < 1.0 - 1e-8 {
                assert!((exp_bump_inverse(y) - u).abs() < 1e-9, "u={u}");
            }
        }
        for k in 1..1000 {
            let y = k as f64 / 1000.0;
            assert!((exp_bump(exp_bump_inverse(y)) - y).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for k in 1..100 {
            let u = k as f64 / 100.0;
            let h = 1e-6;
            let fd = (exp_bump(u + h) - exp_bump(u - h)) / (2.0 * h);
            assert!((fd - exp_bump_derivative(u)).abs() < 1e-6);
        }
        assert!((exp_bump_derivative(0.5) - 2.0).abs() < 1e-12);
    }
}
