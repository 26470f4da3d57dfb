use serde::Serialize;

use super::data::CollapseData;
use crate::decomposition::{validate, DecompositionComplex};
use crate::foliation::LeafFamily;
use crate::kernel::Preimage;
use crate::tolerance;

/// Outcome of one property check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub property: u8,
    pub name: String,
    pub passed: bool,
    /// Largest residual found; for (7) the largest excess over the bound.
    pub defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupReport {
    pub checks: Vec<PropertyCheck>,
}

impl BlowupReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, property: u8) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.property == property)
    }

    pub fn passed(&self, property: u8) -> bool {
        self.check(property).is_some_and(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<u8> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.property).collect()
    }
}

/// Running maximum with the location where it was attained.
struct Worst {
    defect: f64,
    witness: Option<String>,
}

impl Worst {
    fn new() -> Self {
        Self {
            defect: 0.0,
            witness: None,
        }
    }

    fn see(&mut self, d: f64, at: impl FnOnce() -> String) {
        if d > self.defect || (d.is_nan() && !self.defect.is_nan()) {
            self.defect = d;
            self.witness = Some(at());
        }
    }

    fn finish(self, property: u8, name: &str, tol: f64) -> PropertyCheck {
        let passed = self.defect <= tol;
        PropertyCheck {
            property,
            name: name.into(),
            passed,
            defect: self.defect,
            witness: if passed { None } else { self.witness },
        }
    }
}

/// Checks the eight blowup properties for scenes: the blown scene must
/// validate, and its global family is compared with `data`.
pub fn verify_blowup(original: &DecompositionComplex, blown: &DecompositionComplex, data: &CollapseData) -> BlowupReport {
    let scene_ok = validate(blown).all_passed() && validate(original).all_passed();
    match blown.global_family() {
        Some(family) => {
            let mut report = verify_family_blowup(family, data);
            if !scene_ok {
                let c = &mut report.checks[0];
                c.passed = false;
                c.witness = Some("blown scene fails decomposition validation".into());
            }
            report
        }
        None => BlowupReport {
            checks: vec![PropertyCheck {
                property: 1,
                name: "transversality".into(),
                passed: false,
                defect: f64::INFINITY,
                witness: Some("blown scene has no global family".into()),
            }],
        },
    }
}

/// Checks the eight blowup properties of `blown` against the collapse
/// `data` at grid resolution.
pub fn verify_family_blowup(blown: &LeafFamily, data: &CollapseData) -> BlowupReport {
    let chart = data.chart();
    let base = *chart.base();
    let tol = tolerance::COMPARISON;
    let mut checks = Vec::with_capacity(8);

    // (1) the blown family is a transverse product foliation on the same box
    let transverse = blown.base() == &base && blown.validate().is_ok();
    checks.push(PropertyCheck {
        property: 1,
        name: "transversality".into(),
        passed: transverse,
        defect: if transverse { 0.0 } else { f64::INFINITY },
        witness: (!transverse).then(|| "blown family is not a monotone family on the chart base".into()),
    });
    if !transverse {
        return BlowupReport { checks };
    }

    // (2) j is an injective immersion of each packet into its fiber
    let mut w = Worst::new();
    for (k, e) in data.packets().iter().enumerate() {
        if k > 0 && data.packets()[k - 1].gap[1] >= e.gap[0] {
            w.see(f64::INFINITY, || format!("gaps of packets {} and {k} overlap", k - 1));
        }
        for (i, j) in base.nodes() {
            let mut prev = f64::NEG_INFINITY;
            for &s in e.packet.ts() {
                let z = data.inject(k, i, j, s);
                if z <= prev {
                    w.see(prev - z + f64::EPSILON, || format!("packet {k} folds over node ({i}, {j}) at s = {s}"));
                }
                prev = z;
            }
        }
    }
    checks.push(w.finish(2, "injection", 0.0));

    // (3) pi maps j({p} x I) to the blown-up leaf over p
    let mut w = Worst::new();
    for (k, e) in data.packets().iter().enumerate() {
        for (i, j) in base.nodes() {
            let target = chart.eval_node(e.point, i, j);
            for &s in e.packet.ts() {
                let d = (data.apply(i, j, data.inject(k, i, j, s)) - target).abs();
                w.see(d, || format!("packet {k}, node ({i}, {j}), s = {s}"));
            }
        }
    }
    checks.push(w.finish(3, "collapse of packets", tol));

    // (4) packet boundaries are leaves of the blown family
    let [ai, aj] = blown.anchor();
    let mut w = Worst::new();
    for k in 0..data.packets().len() {
        for s in [0.0, 1.0] {
            let tau = blown.leaf_through_node(ai, aj, data.inject(k, ai, aj, s));
            for (i, j) in base.nodes() {
                let d = (blown.eval_node(tau, i, j) - data.inject(k, i, j, s)).abs();
                w.see(d, || format!("packet {k}, boundary s = {s}, node ({i}, {j})"));
            }
        }
    }
    checks.push(w.finish(4, "packet boundaries are leaves", tol));

    // (5) preimages are points off the locus and packet fibers on it
    let mut w = Worst::new();
    let mut labels: Vec<f64> = chart.ts().to_vec();
    labels.extend(data.packets().iter().map(|e| e.point));
    for (i, j) in base.nodes() {
        for &t in &labels {
            let z = chart.eval_node(t, i, j);
            let packet = data.packets().iter().position(|e| e.point == t);
            let d = match (data.preimage(i, j, z), packet) {
                (Preimage::Point(y), None) => (data.apply(i, j, y) - z).abs(),
                (Preimage::Interval(a, b), Some(k)) => {
                    (a - data.inject(k, i, j, 0.0)).abs().max((b - data.inject(k, i, j, 1.0)).abs())
                }
                _ => f64::INFINITY,
            };
            w.see(d, || format!("label {t}, node ({i}, {j})"));
        }
    }
    checks.push(w.finish(5, "preimages", tol));

    // (6) pi maps every blown leaf into a single original leaf
    let mut w = Worst::new();
    for k in 0..blown.leaf_count() {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (i, j) in base.nodes() {
            let t = chart.leaf_through_node(i, j, data.apply(i, j, blown.value(k, i, j)));
            lo = lo.min(t);
            hi = hi.max(t);
        }
        w.see(hi - lo, || format!("blown leaf {k} spreads over original labels [{lo:.12}, {hi:.12}]"));
    }
    checks.push(w.finish(6, "leaves map to leaves", tol));

    // (7) leafwise difference quotients of pi are stable under refinement
    let mut w = Worst::new();
    let periodic = base.periodic();
    for k in 0..blown.leaf_count() {
        for axis in 0..2 {
            let n = base.resolution[axis] as isize;
            let h = base.spacing(axis);
            let pi_at = |i: usize, j: usize| data.apply(i, j, blown.value(k, i, j));
            let shift = |i: usize, j: usize, d: isize| -> Option<(usize, usize)> {
                let c = [i as isize, j as isize][axis] + d;
                let c = if periodic[axis] {
                    c.rem_euclid(n)
                } else if (0..n).contains(&c) {
                    c
                } else {
                    return None;
                };
                Some(if axis == 0 { (c as usize, j) } else { (i, c as usize) })
            };
            let mut quotients = Vec::new();
            for (i, j) in base.nodes() {
                let (Some(a1), Some(b1), Some(a2), Some(b2)) =
                    (shift(i, j, 1), shift(i, j, -1), shift(i, j, 2), shift(i, j, -2))
                else {
                    continue;
                };
                let d1 = (pi_at(a1.0, a1.1) - pi_at(b1.0, b1.1)) / (2.0 * h);
                let d2 = (pi_at(a2.0, a2.1) - pi_at(b2.0, b2.1)) / (4.0 * h);
                quotients.push((i, j, d1, d2));
            }
            let scale = quotients.iter().map(|q| q.2.abs()).fold(0.0, f64::max);
            let bound = 1e-6 + 0.05 * scale;
            for (i, j, d1, d2) in quotients {
                let excess = ((d1 - d2).abs() - bound).max(0.0);
                w.see(excess, || format!("blown leaf {k}, axis {axis}, node ({i}, {j})"));
            }
        }
    }
    checks.push(w.finish(7, "leafwise derivative stability", 0.0));

    // (8) pi_s runs from the identity to pi, between z and pi(z), monotone in s and z
    let mut w = Worst::new();
    let steps = [0.0, 0.25, 0.5, 0.75, 1.0];
    for (i, j) in base.nodes() {
        let mut prev = [f64::NEG_INFINITY; 5];
        for k in 0..blown.leaf_count() {
            let z = blown.value(k, i, j);
            let p = data.apply(i, j, z);
            let mut last = 0.0;
            for (q, &s) in steps.iter().enumerate() {
                let y = data.isotopy(s, i, j, z);
                let d = match q {
                    0 => (y - z).abs(),
                    4 => (y - p).abs(),
                    _ => (z.min(p) - y).max(y - z.max(p)).max(0.0),
                };
                let moved = (y - z).abs();
                let back = (last - moved).max(0.0);
                let fold = (prev[q] - y).max(0.0);
                w.see(d.max(back).max(fold), || format!("node ({i}, {j}), blown leaf {k}, s = {s}"));
                last = moved;
                prev[q] = y;
            }
        }
    }
    checks.push(w.finish(8, "isotopy", tol));

    BlowupReport { checks }
}
