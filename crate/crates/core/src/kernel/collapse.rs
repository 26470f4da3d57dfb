//! Insertion schedules and the collapse map `p = c ∘ s`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite list of blowup points `z_i` in `(0, 1)` with positive weights `w_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct InsertionSchedule {
    entries: Vec<(f64, f64)>,
}

impl InsertionSchedule {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(z, w)) in entries.iter().enumerate() {
            if !(z > 0.0 && z < 1.0) {
                return Err(Error::InvalidSchedule(format!(
                    "entry {i}: point {z} outside (0, 1)"
                )));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidSchedule(format!(
                    "entry {i}: weight {w} must be positive and finite"
                )));
            }
            if i > 0 && entries[i - 1].0 >= z {
                return Err(Error::InvalidSchedule(format!(
                    "entry {i}: points must be strictly increasing"
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Same points, weights multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.entries.iter().map(|&(z, w)| (z, w * factor)).collect())
    }
}

impl TryFrom<Vec<(f64, f64)>> for InsertionSchedule {
    type Error = Error;
    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<InsertionSchedule> for Vec<(f64, f64)> {
    fn from(s: InsertionSchedule) -> Self {
        s.entries
    }
}

/// One collapsed interval `[lo, hi]` of the domain, mapped to `point`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapsedInterval {
    pub lo: f64,
    pub hi: f64,
    pub point: f64,
}

impl CollapsedInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// The Denjoy collapse `p = c ∘ s : [0, 1] -> [0, 1]`.
///
/// `s` scales `[0, 1]` onto `[0, 1 + w]`; `c` is the Cantor-style left
/// inverse of inserting an interval of length `w_i` at each `z_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseMap {
    schedule: InsertionSchedule,
    total: f64,
    /// start of each inserted interval `J_i` inside `[0, 1 + w]`
    starts: Vec<f64>,
    /// weight inserted strictly before entry `i`
    before: Vec<f64>,
    intervals: Vec<CollapsedInterval>,
}

/// Preimage of a point under a collapse map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preimage {
    Point(f64),
    Interval(f64, f64),
}

impl Preimage {
    pub fn as_point(&self) -> Option<f64> {
        match *self {
            Preimage::Point(x) => Some(x),
            Preimage::Interval(..) => None,
        }
    }
}

/// Serializable summary used in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseSummary {
    pub slope: f64,
    pub intervals: Vec<CollapsedInterval>,
}

pub fn build_collapse(schedule: &InsertionSchedule) -> Result<CollapseMap> {
    let total = schedule.total_weight();
    let scale = 1.0 + total;
    let mut starts = Vec::with_capacity(schedule.len());
    let mut before = Vec::with_capacity(schedule.len());
    let mut intervals = Vec::with_capacity(schedule.len());
    let mut acc = 0.0;
    for &(z, w) in schedule.entries() {
        let start = z + acc;
        starts.push(start);
        before.push(acc);
        intervals.push(CollapsedInterval {
            lo: start / scale,
            hi: (start + w) / scale,
            point: z,
        });
        acc += w;
    }
    for i in 1..intervals.len() {
        if intervals[i].lo < intervals[i - 1].hi {
            return Err(Error::OverlappingInsertion {
                first: i - 1,
                second: i,
            });
        }
    }
    Ok(CollapseMap {
        schedule: schedule.clone(),
        total,
        starts,
        before,
        intervals,
    })
}

/// Preimage of `y` under `map`: the collapsed interval if `y` is a blowup
/// point, otherwise the unique point of the complement.
pub fn collapse_preimage(map: &CollapseMap, y: f64) -> Preimage {
    let entries = map.schedule.entries();
    // number of blowup points strictly below y
    let below = entries.partition_point(|e| e.0 < y);
    if below < entries.len() && entries[below].0 == y {
        let iv = map.intervals[below];
        return Preimage::Interval(iv.lo, iv.hi);
    }
    let inserted: f64 = entries[..below].iter().map(|e| e.1).sum();
    Preimage::Point((y + inserted) / (1.0 + map.total))
}

impl CollapseMap {
    pub fn identity() -> Self {
        build_collapse(&InsertionSchedule::empty()).expect("empty schedule is valid")
    }

    pub fn schedule(&self) -> &InsertionSchedule {
        &self.schedule
    }

    pub fn total_weight(&self) -> f64 {
        self.total
    }

    /// Slope `1 + w` of the affine pieces.
    pub fn slope(&self) -> f64 {
        1.0 + self.total
    }

    pub fn intervals(&self) -> &[CollapsedInterval] {
        &self.intervals
    }

    /// The linear scaling `s : [0, 1] -> [0, 1 + w]`.
    pub fn scale(&self, x: f64) -> f64 {
        x * (1.0 + self.total)
    }

    /// The Cantor function `c : [0, 1 + w] -> [0, 1]`.
    pub fn cantor(&self, y: f64) -> f64 {
        // first inserted interval whose end lies beyond y
        let k = self
            .starts
            .iter()
            .zip(self.schedule.entries())
            .position(|(&s, &(_, w))| y <= s + w);
        match k {
            None => y - self.total,
            Some(i) if y >= self.starts[i] => self.schedule.entries()[i].0,
            Some(i) => y - self.before[i],
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        // binary search on collapsed intervals instead of the linear scan in `cantor`
        let i = self.intervals.partition_point(|iv| iv.hi < x);
        if let Some(iv) = self.intervals.get(i) {
            if x >= iv.lo {
                return iv.point;
            }
        }
        let y = self.scale(x);
        let entries = self.schedule.entries();
        // clamp between neighbouring blowup points so rounding keeps p monotone
        let lo = if i == 0 { 0.0 } else { entries[i - 1].0 };
        let hi = entries.get(i).map_or(1.0, |e| e.0);
        let y = if i == 0 {
            y
        } else {
            y - self.before[i - 1] - entries[i - 1].1
        };
        y.clamp(lo, hi)
    }

    /// Straight-line isotopy `(1 - s) x + s p(x)` from the identity to `p`.
    pub fn isotopy(&self, s: f64, x: f64) -> f64 {
        (1.0 - s) * x + s * self.apply(x)
    }

    pub fn summary(&self) -> CollapseSummary {
        CollapseSummary {
            slope: self.slope(),
            intervals: self.intervals.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn single_insertion() {
        let map = build_collapse(&InsertionSchedule::new(vec![(0.5, 1.0)]).unwrap()).unwrap();
        let iv = map.intervals()[0];
        assert!(close(iv.lo, 0.25) && close(iv.hi, 0.75));
        assert!(close(map.apply(0.1), 0.2));
        assert!(close(map.apply(0.5), 0.5));
        assert!(close(map.apply(0.9), 0.8));
        // the c∘s route agrees with the interval lookup
        for k in 0..=100 {
            let x = k as f64 / 100.0;
            assert!(close(map.cantor(map.scale(x)), map.apply(x)));
        }
    }

    #[test]
    fn empty_schedule_is_identity() {
        let map = CollapseMap::identity();
        for k in 0..=10 {
            let x = k as f64 / 10.0;
            assert_eq!(map.apply(x), x);
        }
        assert_eq!(collapse_preimage(&map, 0.3), Preimage::Point(0.3));
    }

    #[test]
    fn two_insertions() {
        let s = InsertionSchedule::new(vec![(1.0 / 3.0, 1.0), (2.0 / 3.0, 1.0)]).unwrap();
        let map = build_collapse(&s).unwrap();
        let [a, b] = [map.intervals()[0], map.intervals()[1]];
        assert!(close(a.lo, 1.0 / 9.0) && close(a.hi, 4.0 / 9.0));
        assert!(close(b.lo, 5.0 / 9.0) && close(b.hi, 8.0 / 9.0));
        for iv in [a, b] {
            assert!(close(iv.width(), 1.0 / 3.0));
        }
    }

    #[test]
    fn preimages() {
        let map = build_collapse(&InsertionSchedule::new(vec![(0.5, 1.0)]).unwrap()).unwrap();
        assert_eq!(collapse_preimage(&map, 0.5), Preimage::Interval(0.25, 0.75));
        assert!(close(collapse_preimage(&map, 0.1).as_point().unwrap(), 0.05));
    }

    #[test]
    fn schedule_validation() {
        assert!(InsertionSchedule::new(vec![(0.0, 1.0)]).is_err());
        assert!(InsertionSchedule::new(vec![(0.5, 0.0)]).is_err());
        assert!(InsertionSchedule::new(vec![(0.6, 1.0), (0.5, 1.0)]).is_err());
        assert!(InsertionSchedule::new(vec![(0.5, f64::INFINITY)]).is_err());
    }

    #[test]
    fn isotopy_endpoints() {
        let map = build_collapse(&InsertionSchedule::new(vec![(0.4, 0.3)]).unwrap()).unwrap();
        for k in 0..=20 {
            let x = k as f64 / 20.0;
            assert_eq!(map.isotopy(0.0, x), x);
            assert!(close(map.isotopy(1.0, x), map.apply(x)));
        }
    }
}
