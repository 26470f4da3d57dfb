use serde::Serialize;

use crate::error::{Error, Result};
use crate::foliation::{c0_distance, mix, LeafFamily};
use crate::kernel::{choose_partition_fixed, exp_bump, exp_bump_inverse, Partition};
use crate::tolerance;

/// Output of [`smooth_in_t`].
///
/// Leaf `k` of `family` is `g_t = (1 - l_i(t)) f_{t_{i-1}} + l_i(t) f_{t_i}` with
/// `t = params[k]`, where `l_i` is the damping profile rescaled to cell `i`.
/// Leaves keep the labels of the input grid, so `params` is the smooth
/// parameter behind each label.
#[derive(Debug, Clone, Serialize)]
pub struct SmoothedFamily {
    pub family: LeafFamily,
    pub partition: Partition,
    pub params: Vec<f64>,
    pub achieved: f64,
    pub retries: usize,
}

impl SmoothedFamily {
    /// Largest deviation at grid nodes from the defining convex combination.
    pub fn formula_residual(&self, input: &LeafFamily) -> f64 {
        let cuts = self.partition.cuts();
        let samples = self.partition.samples();
        let mut worst = 0.0f64;
        for (k, &t) in self.params.iter().enumerate() {
            let c = cuts.partition_point(|&x| x <= t).clamp(1, cuts.len() - 1) - 1;
            let l = exp_bump((t - cuts[c]) / (cuts[c + 1] - cuts[c]));
            let (fa, fb) = (input.leaf(samples[c]), input.leaf(samples[c + 1]));
            for (p, &g) in self.family.leaf(k).iter().enumerate() {
                worst = worst.max(((1.0 - l) * fa[p] + l * fb[p] - g).abs());
            }
        }
        worst
    }
}

/// Replaces the family between partition leaves by damped convex
/// combinations of the bounding partition leaves.
///
/// The partition is chosen greedily for `epsilon` and forced through
/// `fixed_leaves`; if the measured distance still exceeds `epsilon` the
/// partition is refined and the construction rerun.
pub fn smooth_in_t(family: &LeafFamily, epsilon: f64, fixed_leaves: &[f64]) -> Result<SmoothedFamily> {
    let fixed = fixed_indices(family, fixed_leaves)?;
    let partition = choose_partition_fixed(family, epsilon, &fixed)?;
    smooth_with_retry(family, partition, epsilon)
}

/// Sample indices of the leaves labelled `fixed_leaves`.
pub(crate) fn fixed_indices(family: &LeafFamily, fixed_leaves: &[f64]) -> Result<Vec<usize>> {
    fixed_leaves
        .iter()
        .map(|&t| {
            family
                .ts()
                .iter()
                .position(|&s| (s - t).abs() <= tolerance::FORMULA)
                .ok_or_else(|| Error::InvalidParameter(format!("fixed leaf {t} is not a sampled leaf")))
        })
        .collect()
}

pub(crate) fn smooth_with_retry(
    family: &LeafFamily,
    mut partition: Partition,
    epsilon: f64,
) -> Result<SmoothedFamily> {
    let mut retries = 0;
    loop {
        let mut out = interpolate_on(family, &partition)?;
        out.retries = retries;
        if out.achieved <= epsilon {
            return Ok(out);
        }
        match partition.refine(family) {
            Some(finer) if retries < tolerance::RETRY_CAP => {
                partition = finer;
                retries += 1;
            }
            _ => {
                return Err(Error::BudgetExceeded {
                    epsilon,
                    achieved: out.achieved,
                    retries,
                })
            }
        }
    }
}

/// The interpolation smoothing on a given partition, without a budget.
pub fn interpolate_on(family: &LeafFamily, partition: &Partition) -> Result<SmoothedFamily> {
    let ts = family.ts();
    let cuts = partition.cuts();
    let samples = partition.samples();
    let n = family.base().node_count();
    let mut values = Vec::with_capacity(family.values().len());
    let mut params = Vec::with_capacity(ts.len());
    let mut cell = 0;
    for (k, &tau) in ts.iter().enumerate() {
        while cell + 2 < samples.len() && samples[cell + 1] <= k {
            cell += 1;
        }
        let (sa, sb) = (samples[cell], samples[cell + 1]);
        if k == sa || k == sb {
            values.extend_from_slice(family.leaf(k));
            params.push(tau);
            continue;
        }
        let (a, b) = (cuts[cell], cuts[cell + 1]);
        let u = exp_bump_inverse((tau - a) / (b - a));
        let w = exp_bump(u);
        let (fa, fb) = (family.leaf(sa), family.leaf(sb));
        let start = values.len();
        values.extend((0..n).map(|p| mix(fa[p], fb[p], w)));
        let f = family.leaf(k);
        if values[start..].iter().zip(f).all(|(g, f)| (g - f).abs() <= tolerance::FORMULA) {
            // already of the target form
            values.truncate(start);
            values.extend_from_slice(f);
        }
        params.push(a + u * (b - a));
    }
    let out = LeafFamily::new(*family.base(), ts.to_vec(), values, family.anchor())?;
    let achieved = c0_distance(family, &out)?;
    Ok(SmoothedFamily {
        family: out,
        partition: partition.clone(),
        params,
        achieved,
        retries: 0,
    })
}
