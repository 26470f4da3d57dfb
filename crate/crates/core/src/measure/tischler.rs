use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constant-coefficient closed 1-form `sum c_i dx_i` on `T^2` or `T^3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedOneForm {
    pub coefficients: Vec<f64>,
}

impl ClosedOneForm {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if !(2..=3).contains(&coefficients.len()) {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients; forms live on T^2 or T^3",
                coefficients.len()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) || coefficients.iter().all(|&c| c == 0.0) {
            return Err(Error::InvalidParameter("form must be finite and nonvanishing".into()));
        }
        Ok(Self { coefficients })
    }

    /// Index of the first nonzero coefficient.
    pub fn pivot(&self) -> usize {
        self.coefficients.iter().position(|&c| c != 0.0).expect("nonvanishing form")
    }
}

/// Angle between the kernels of two forms, i.e. between their coefficient
/// vectors.
pub fn kernel_angle(a: &[f64], b: &[f64]) -> f64 {
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (mut diff, mut sum) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (u, v) = (x / na, y / nb);
        diff += (u - v) * (u - v);
        sum += (u + v) * (u + v);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

/// A continued-fraction convergent `p / q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    pub p: i64,
    pub q: i64,
}

impl Convergent {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

/// Convergents of `x`, stopping when the expansion terminates, at `max`
/// terms, or before the integers overflow.
pub fn convergents(x: f64, max: usize) -> Vec<Convergent> {
    let mut out = Vec::new();
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..max {
        let a = r.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let (Some(p), Some(q)) = (
            a.checked_mul(p1).and_then(|v| v.checked_add(p0)),
            a.checked_mul(q1).and_then(|v| v.checked_add(q0)),
        ) else {
            break;
        };
        out.push(Convergent { p, q });
        if (p as f64 / q as f64) == x {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p, q);
        let frac = r - a as f64;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

/// Integer check that the rational form defines a fibration over the circle
/// whose fibers close up.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedLeafCertificate {
    /// Primitive integer coefficients of the rational form.
    pub integer_form: Vec<i64>,
    /// Absolute pivot coefficient: the number of wraps after which every
    /// leaf returns to its starting point.
    pub period: i64,
    pub grid: usize,
    pub verified: bool,
}

/// Output of [`tischler_fibration`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TischlerFibration {
    pub input: Vec<f64>,
    pub pivot: usize,
    /// Ratios `c_i / c_pivot` of the rational form, as convergents.
    pub ratios: Vec<Convergent>,
    pub rational: Vec<f64>,
    pub angle_defect: f64,
    pub epsilon: f64,
    pub certificate: ClosedLeafCertificate,
}

const MAX_TERMS: usize = 40;

/// Approximates `form` by a rational form whose kernel is within `epsilon`
/// radians of the kernel of `form`, using for each coefficient ratio the
/// continued-fraction convergent of smallest denominator that meets the
/// bound, and certifies that the rational kernel foliation is a fibration.
pub fn tischler_fibration(form: &ClosedOneForm, epsilon: f64) -> Result<TischlerFibration> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be positive")));
    }
    let c = &form.coefficients;
    let pivot = form.pivot();
    let others: Vec<usize> = (0..c.len()).filter(|&i| i != pivot).collect();
    let series: Vec<Vec<Convergent>> = others.iter().map(|&i| convergents(c[i] / c[pivot], MAX_TERMS)).collect();
    let mut level = vec![0usize; others.len()];
    let build = |level: &[usize]| -> Vec<f64> {
        let mut v = vec![0.0; c.len()];
        v[pivot] = c[pivot];
        for (k, &i) in others.iter().enumerate() {
            v[i] = c[pivot] * series[k][level[k]].value();
        }
        v
    };
    loop {
        let rational = build(&level);
        let angle = kernel_angle(c, &rational);
        if angle <= epsilon {
            let ratios: Vec<Convergent> = (0..others.len()).map(|k| series[k][level[k]]).collect();
            let integer_form = integer_form(c.len(), pivot, &others, &ratios, c[pivot] < 0.0);
            let certificate = certify(&integer_form, pivot, 16);
            return Ok(TischlerFibration {
                input: c.clone(),
                pivot,
                ratios,
                rational,
                angle_defect: angle,
                epsilon,
                certificate,
            });
        }
        // advance the ratio contributing the largest error
        let worst = (0..others.len())
            .filter(|&k| level[k] + 1 < series[k].len())
            .max_by(|&a, &b| {
                let err = |k: usize| (series[k][level[k]].value() - c[others[k]] / c[pivot]).abs();
                err(a).total_cmp(&err(b))
            });
        match worst {
            Some(k) => level[k] += 1,
            None => {
                return Err(Error::InvalidParameter(format!(
                    "no convergent within {MAX_TERMS} terms meets epsilon {epsilon:.3e} (best {angle:.3e})"
                )))
            }
        }
    }
}

fn integer_form(n: usize, pivot: usize, others: &[usize], ratios: &[Convergent], negate: bool) -> Vec<i64> {
    let l = ratios.iter().fold(1i64, |acc, r| acc.lcm(&r.q));
    let mut v = vec![0i64; n];
    v[pivot] = l;
    for (k, &i) in others.iter().enumerate() {
        v[i] = ratios[k].p * (l / ratios[k].q);
    }
    let g = v.iter().fold(0, |acc: i64, &x| acc.gcd(&x));
    let s = if negate { -1 } else { 1 };
    v.into_iter().map(|x| s * x / g).collect()
}

/// Follows the leaf of the rational kernel foliation through each point of
/// an `n`-grid on the pivot circle once around each other axis, in exact
/// integer arithmetic, and records after how many wraps it first returns
/// to its starting point; the fibers close up when the combined return
/// count is the pivot coefficient at every grid point.
fn certify(form: &[i64], pivot: usize, n: usize) -> ClosedLeafCertificate {
    let a = form[pivot];
    let period = a.abs();
    let modulus = period * n as i64;
    let mut verified = form.iter().fold(0, |acc: i64, &x| acc.gcd(&x)) == 1;
    for i in 0..n as i64 {
        // pivot coordinate i / n in units of 1 / (period n)
        let x0 = (i * period).rem_euclid(modulus);
        let mut combined = 1i64;
        for (axis, &b) in form.iter().enumerate() {
            if axis == pivot {
                continue;
            }
            // one wrap along `axis` moves the leaf by -b / a along the pivot
            let step = (b * n as i64 * a.signum()).rem_euclid(modulus);
            let mut x = x0;
            let mut wraps = 0i64;
            loop {
                x = (x - step).rem_euclid(modulus);
                wraps += 1;
                if x == x0 || wraps > period {
                    break;
                }
            }
            combined = combined.lcm(&wraps);
        }
        verified &= combined == period;
    }
    ClosedLeafCertificate {
        integer_form: form.to_vec(),
        period,
        grid: n,
        verified,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergents_of_sqrt2() {
        let c = convergents(2f64.sqrt(), 8);
        let pq: Vec<(i64, i64)> = c.iter().map(|c| (c.p, c.q)).collect();
        assert_eq!(&pq[..6], &[(1, 1), (3, 2), (7, 5), (17, 12), (41, 29), (99, 70)]);
    }

    #[test]
    fn rational_input_terminates() {
        assert_eq!(convergents(0.0, 10), vec![Convergent { p: 0, q: 1 }]);
        assert_eq!(convergents(0.75, 10).last(), Some(&Convergent { p: 3, q: 4 }));
    }

    #[test]
    fn kernel_angle_matches_slopes() {
        let r = 2f64.sqrt();
        let d = kernel_angle(&[1.0, r], &[1.0, 17.0 / 12.0]);
        assert!((d - ((17.0f64 / 12.0).atan() - r.atan()).abs()).abs() < 1e-15);
    }
}
