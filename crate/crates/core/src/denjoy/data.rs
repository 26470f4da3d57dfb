use serde::Serialize;

use crate::error::{Error, Result};
use crate::foliation::LeafFamily;
use crate::kernel::{build_collapse, collapse_preimage, CollapseMap, CollapseSummary, InsertionSchedule, Preimage};

/// Stretch of the leaf coordinate between two fixed leaves, blown up with
/// its own collapse map in normalized coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseSegment {
    pub lo: f64,
    pub hi: f64,
    pub map: CollapseMap,
}

impl CollapseSegment {
    fn len(&self) -> f64 {
        self.hi - self.lo
    }

    fn holds(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }
}

/// Inserted packet over a blown-up leaf: the packet foliation `q_s` on the
/// leaf, placed in the gap `[lo, hi]` of the leaf coordinate by the linear
/// map `s -> lo + (hi - lo) s`.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketEmbedding {
    /// Leaf coordinate of the blown-up leaf.
    pub point: f64,
    pub gap: [f64; 2],
    pub packet: LeafFamily,
}

/// The collapse `pi`, its straight-line isotopy and the packet injection
/// `j`, all expressed through the leaf coordinate of `chart`: a point
/// `(x, z)` has coordinate the label of the `chart` leaf through it.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseData {
    chart: LeafFamily,
    segments: Vec<CollapseSegment>,
    packets: Vec<PacketEmbedding>,
    /// Offset of the argument of every segment map; zero except for
    /// deliberately corrupted data.
    offset: f64,
}

/// Serializable view of [`CollapseData`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseDataSummary {
    pub segments: Vec<SegmentSummary>,
    pub packets: Vec<PacketSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentSummary {
    pub lo: f64,
    pub hi: f64,
    pub collapse: CollapseSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PacketSummary {
    pub point: f64,
    pub gap: [f64; 2],
    pub leaves: usize,
}

impl CollapseData {
    /// `pi = id` with no packets.
    pub fn identity(chart: &LeafFamily) -> Self {
        Self {
            chart: chart.clone(),
            segments: vec![CollapseSegment {
                lo: 0.0,
                hi: 1.0,
                map: CollapseMap::identity(),
            }],
            packets: Vec::new(),
            offset: 0.0,
        }
    }

    /// Blowup of the `chart` leaves listed in `schedule`, cut open along
    /// the `fixed` leaves so that `pi` is the identity on them. Each
    /// segment between fixed leaves uses the schedule's weights in its own
    /// normalized coordinate.
    pub fn new(
        chart: &LeafFamily,
        schedule: &InsertionSchedule,
        packets: &[LeafFamily],
        fixed: &[f64],
    ) -> Result<Self> {
        if packets.len() != schedule.len() {
            return Err(Error::InvalidParameter(format!(
                "{} packets for {} blown-up leaves",
                packets.len(),
                schedule.len()
            )));
        }
        for p in packets {
            if p.base() != chart.base() {
                return Err(Error::BaseMismatch);
            }
        }
        let mut cuts = vec![0.0, 1.0];
        for &t in fixed {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::InvalidParameter(format!("fixed leaf {t} outside [0, 1]")));
            }
            cuts.push(t);
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for &(z, _) in schedule.entries() {
            if cuts.iter().any(|c| (c - z).abs() <= 1e-12) {
                return Err(Error::InvalidSchedule(format!(
                    "blown-up leaf {z} coincides with a fixed leaf"
                )));
            }
        }
        let mut segments = Vec::with_capacity(cuts.len() - 1);
        let mut embedded = Vec::with_capacity(packets.len());
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let len = hi - lo;
            let local: Vec<(usize, f64, f64)> = schedule
                .entries()
                .iter()
                .enumerate()
                .filter(|(_, e)| e.0 > lo && e.0 < hi)
                .map(|(i, &(z, wt))| (i, (z - lo) / len, wt))
                .collect();
            let map = build_collapse(&InsertionSchedule::new(
                local.iter().map(|&(_, z, wt)| (z, wt)).collect(),
            )?)?;
            for (iv, &(i, _, _)) in map.intervals().iter().zip(&local) {
                embedded.push(PacketEmbedding {
                    point: schedule.entries()[i].0,
                    gap: [lo + len * iv.lo, lo + len * iv.hi],
                    packet: packets[i].clone(),
                });
            }
            segments.push(CollapseSegment { lo, hi, map });
        }
        embedded.sort_by(|a, b| a.point.total_cmp(&b.point));
        Ok(Self {
            chart: chart.clone(),
            segments,
            packets: embedded,
            offset: 0.0,
        })
    }

    pub fn chart(&self) -> &LeafFamily {
        &self.chart
    }

    pub fn segments(&self) -> &[CollapseSegment] {
        &self.segments
    }

    pub fn packets(&self) -> &[PacketEmbedding] {
        &self.packets
    }

    fn segment(&self, t: f64) -> &CollapseSegment {
        let t = t.clamp(0.0, 1.0);
        self.segments
            .iter()
            .find(|s| s.holds(t))
            .expect("segments cover [0, 1]")
    }

    /// The collapse on the leaf coordinate.
    pub fn collapse_label(&self, t: f64) -> f64 {
        let s = self.segment(t);
        s.lo + s.len() * s.map.apply((t - s.lo) / s.len() - self.offset)
    }

    /// Preimage of the leaf coordinate `t` under [`Self::collapse_label`].
    pub fn preimage_label(&self, t: f64) -> Preimage {
        let s = self.segment(t);
        match collapse_preimage(&s.map, (t - s.lo) / s.len()) {
            Preimage::Point(u) => Preimage::Point(s.lo + s.len() * u),
            Preimage::Interval(a, b) => Preimage::Interval(s.lo + s.len() * a, s.lo + s.len() * b),
        }
    }

    /// `pi` on the fiber over node `(i, j)`.
    pub fn apply(&self, i: usize, j: usize, z: f64) -> f64 {
        let t = self.chart.leaf_through_node(i, j, z);
        self.chart.eval_node(self.collapse_label(t), i, j)
    }

    /// Preimage of the height `z` over node `(i, j)`, in heights.
    pub fn preimage(&self, i: usize, j: usize, z: f64) -> Preimage {
        let t = self.chart.leaf_through_node(i, j, z);
        match self.preimage_label(t) {
            Preimage::Point(u) => Preimage::Point(self.chart.eval_node(u, i, j)),
            Preimage::Interval(a, b) => {
                Preimage::Interval(self.chart.eval_node(a, i, j), self.chart.eval_node(b, i, j))
            }
        }
    }

    /// `pi_s(z) = (1 - s) z + s pi(z)` along the fiber.
    pub fn isotopy(&self, s: f64, i: usize, j: usize, z: f64) -> f64 {
        (1.0 - s) * z + s * self.apply(i, j, z)
    }

    /// Leaf coordinate of `j(p, s)` for packet `k`, `p` over node `(i, j)`,
    /// with `s` a packet label.
    pub fn inject_label(&self, k: usize, i: usize, j: usize, s: f64) -> f64 {
        let e = &self.packets[k];
        e.gap[0] + (e.gap[1] - e.gap[0]) * e.packet.eval_node(s, i, j)
    }

    /// Height of `j(p, s)`.
    pub fn inject(&self, k: usize, i: usize, j: usize, s: f64) -> f64 {
        self.chart.eval_node(self.inject_label(k, i, j, s), i, j)
    }

    /// Same data with `pi` replaced by `pi` precomposed with a shift of
    /// `delta` in every segment's normalized coordinate, which moves each
    /// collapsed interval by `delta`; used to exercise the verification.
    #[doc(hidden)]
    pub fn with_shifted_intervals(&self, delta: f64) -> Self {
        Self {
            offset: self.offset + delta,
            ..self.clone()
        }
    }

    pub fn summary(&self) -> CollapseDataSummary {
        CollapseDataSummary {
            segments: self
                .segments
                .iter()
                .map(|s| SegmentSummary {
                    lo: s.lo,
                    hi: s.hi,
                    collapse: s.map.summary(),
                })
                .collect(),
            packets: self
                .packets
                .iter()
                .map(|p| PacketSummary {
                    point: p.point,
                    gap: p.gap,
                    leaves: p.packet.leaf_count(),
                })
                .collect(),
        }
    }

    /// The blown-up family: the chart leaves off the blown-up leaves,
    /// pulled back into the complement of the gaps, together with the
    /// packet leaves placed in the gaps.
    pub fn blown_family(&self) -> Result<LeafFamily> {
        let chart = &self.chart;
        let base = *chart.base();
        let n = base.node_count();
        // leaves as (coordinate at the anchor, coordinates over all nodes)
        let mut leaves: Vec<(f64, Vec<f64>)> = Vec::new();
        for &t in chart.ts() {
            if let Preimage::Point(u) = self.preimage_label(t) {
                leaves.push((u, vec![u; n]));
            }
        }
        let [ai, aj] = chart.anchor();
        for (k, e) in self.packets.iter().enumerate() {
            for s in e.packet.ts() {
                let coords: Vec<f64> = base.nodes().map(|(i, j)| self.inject_label(k, i, j, *s)).collect();
                leaves.push((coords[base.index(ai, aj)], coords));
            }
        }
        leaves.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values = Vec::with_capacity(leaves.len() * n);
        for (_, coords) in &leaves {
            values.extend(base.nodes().map(|(i, j)| chart.eval_node(coords[base.index(i, j)], i, j)));
        }
        LeafFamily::from_leaves(base, values, chart.anchor())
    }
}
