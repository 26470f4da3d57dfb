use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foliation::{graph_normal, normal_angle, LeafFamily};

/// Cut points `0 = t_0 < ... < t_n = 1`, each a sampled leaf index of the
/// family the partition was chosen for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    cuts: Vec<f64>,
    samples: Vec<usize>,
}

impl Partition {
    /// Partition of `family` at the given sample indices.
    pub fn from_samples(family: &LeafFamily, mut samples: Vec<usize>) -> Result<Self> {
        let m = family.leaf_count();
        samples.push(0);
        samples.push(m - 1);
        samples.sort_unstable();
        samples.dedup();
        if let Some(&k) = samples.iter().find(|&&k| k >= m) {
            return Err(Error::InvalidParameter(format!("sample {k} out of range")));
        }
        let cuts = samples.iter().map(|&k| family.ts()[k]).collect();
        Ok(Self { cuts, samples })
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    /// Sample indices of the cuts.
    pub fn samples(&self) -> &[usize] {
        &self.samples
    }

    pub fn cell_count(&self) -> usize {
        self.cuts.len() - 1
    }

    /// Splits every cell with an interior sample at its middle sample.
    /// Returns `None` when no cell can be split.
    pub fn refine(&self, family: &LeafFamily) -> Option<Self> {
        let mut samples = self.samples.clone();
        for w in self.samples.windows(2) {
            if w[1] - w[0] > 1 {
                samples.push((w[0] + w[1]) / 2);
            }
        }
        if samples.len() == self.samples.len() {
            return None;
        }
        Self::from_samples(family, samples).ok()
    }
}

/// Greedy partition whose cells keep every node's leaf normals within `epsilon`.
pub fn choose_partition(family: &LeafFamily, epsilon: f64) -> Result<Partition> {
    choose_partition_fixed(family, epsilon, &[])
}

/// [`choose_partition`] forced to cut at the sample indices in `fixed`.
///
/// Normals of interpolated leaves lie on arcs between sampled normals, so
/// checking sampled leaves pairwise bounds every leaf of a cell.
pub fn choose_partition_fixed(family: &LeafFamily, epsilon: f64, fixed: &[usize]) -> Result<Partition> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be positive")));
    }
    let m = family.leaf_count();
    let base = family.base();
    let n = base.node_count();
    let mut normals = Vec::with_capacity(m * n);
    for k in 0..m {
        for (i, j) in base.nodes() {
            normals.push(graph_normal(family.leaf_gradient(k, i, j)));
        }
    }
    let nrm = |k: usize, p: usize| normals[k * n + p];
    let mut samples = vec![0];
    let mut start = 0;
    while start < m - 1 {
        let mut end = start + 1;
        let worst = (0..n)
            .map(|p| normal_angle(nrm(start, p), nrm(end, p)))
            .fold(0.0, f64::max);
        if worst > epsilon {
            return Err(Error::PartitionTooCoarse {
                lower: start,
                upper: end,
                angle: worst,
                epsilon,
            });
        }
        while end + 1 < m && !fixed.contains(&end) {
            let cand = end + 1;
            let ok = (0..n).all(|p| (start..cand).all(|k| normal_angle(nrm(k, p), nrm(cand, p)) <= epsilon));
            if !ok {
                break;
            }
            end = cand;
        }
        samples.push(end);
        start = end;
    }
    Partition::from_samples(family, samples)
}

/// Largest pairwise normal angle inside any cell of `partition`.
pub fn partition_spread(family: &LeafFamily, partition: &Partition) -> f64 {
    let base = family.base();
    let mut worst = 0.0f64;
    for w in partition.samples().windows(2) {
        for (i, j) in base.nodes() {
            let ns: Vec<_> = (w[0]..=w[1])
                .map(|k| graph_normal(family.leaf_gradient(k, i, j)))
                .collect();
            for a in 0..ns.len() {
                for b in a + 1..ns.len() {
                    worst = worst.max(normal_angle(ns[a], ns[b]));
                }
            }
        }
    }
    worst
}
