//! Exact interval arithmetic on the unit circle and on products of circles.

use serde::{Deserialize, Serialize};

/// Slack for comparing interval endpoints that are meant to coincide.
pub const SLACK: f64 = 1e-12;

/// Closed arc `[lo, hi]` of the unit circle with `hi - lo` in `[0, 1]`.
pub type Arc = [f64; 2];

/// Intersection of two closed arcs, as sub-arcs in the coordinates of `a`.
pub fn arc_overlaps(a: Arc, b: Arc) -> Vec<Arc> {
    let mut parts: Vec<Arc> = Vec::new();
    for k in [-1.0, 0.0, 1.0] {
        let lo = a[0].max(b[0] + k);
        let hi = a[1].min(b[1] + k);
        if hi >= lo - SLACK {
            parts.push([lo, hi.max(lo)]);
        }
    }
    // a point on the seam of a full arc can appear twice
    let mut out: Vec<Arc> = Vec::new();
    for (n, p) in parts.iter().enumerate() {
        let dup = p[1] - p[0] <= SLACK
            && parts
                .iter()
                .enumerate()
                .any(|(m, q)| m != n && (m < n || q[1] - q[0] > SLACK) && arc_holds(*q, p[0]));
        if !dup {
            out.push(*p);
        }
    }
    out
}

/// Whether the point `x` lies on the closed arc `a`, modulo 1.
pub fn arc_holds(a: Arc, x: f64) -> bool {
    [-1.0, 0.0, 1.0]
        .iter()
        .any(|k| x + k >= a[0] - SLACK && x + k <= a[1] + SLACK)
}

/// Whether `inner` is contained in `outer`, modulo 1.
pub fn arc_contains(outer: Arc, inner: Arc) -> bool {
    if outer[1] - outer[0] >= 1.0 - SLACK {
        return true;
    }
    [-1.0, 0.0, 1.0]
        .iter()
        .any(|k| inner[0] + k >= outer[0] - SLACK && inner[1] + k <= outer[1] + SLACK)
}

/// Whether the open interior of `open` meets the closed arc `closed`.
/// A degenerate `open` arc is treated as its single point.
pub fn arc_meets_interior(open: Arc, closed: Arc) -> bool {
    if open[1] - open[0] <= SLACK {
        return arc_holds(closed, open[0]);
    }
    arc_overlaps(open, closed).iter().any(|p| {
        let lo = p[0].max(open[0]);
        let hi = p[1].min(open[1]);
        // the overlap reaches past the boundary of `open`, or is a proper
        // sub-arc sitting strictly inside it
        hi - lo > SLACK || (lo > open[0] + SLACK && hi < open[1] - SLACK)
    })
}

pub fn arc_len(a: Arc) -> f64 {
    a[1] - a[0]
}

/// Circular distance between two points of the unit circle.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Closed product of three arcs in `T^3 = (R/Z)^3`; the last axis is the leaf direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub arcs: [Arc; 3],
}

impl Cell {
    pub fn new(arcs: [Arc; 3]) -> Self {
        Self { arcs }
    }

    /// Number of non-degenerate axes.
    pub fn dimension(&self) -> usize {
        self.arcs.iter().filter(|a| arc_len(**a) > SLACK).count()
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|a| arc_len(*a)).product()
    }

    /// Connected components of the intersection, in the coordinates of `self`.
    pub fn intersect(&self, other: &Cell) -> Vec<Cell> {
        let per: Vec<Vec<Arc>> = (0..3)
            .map(|a| arc_overlaps(self.arcs[a], other.arcs[a]))
            .collect();
        let mut out = Vec::new();
        for x in &per[0] {
            for y in &per[1] {
                for z in &per[2] {
                    out.push(Cell::new([*x, *y, *z]));
                }
            }
        }
        out
    }

    pub fn contains(&self, inner: &Cell) -> bool {
        (0..3).all(|a| arc_contains(self.arcs[a], inner.arcs[a]))
    }

    /// Whether the relative interior of `self` meets the closed cell `other`.
    pub fn interior_meets(&self, other: &Cell) -> bool {
        (0..3).all(|a| arc_meets_interior(self.arcs[a], other.arcs[a]))
    }

    /// Mutual containment.
    pub fn same(&self, other: &Cell) -> bool {
        self.contains(other) && other.contains(self)
    }
}

/// Area of a union of axis-aligned rectangles `[x, y]` in the plane.
pub fn union_area(rects: &[[Arc; 2]]) -> f64 {
    let mut xs: Vec<f64> = rects.iter().flat_map(|r| [r[0][0], r[0][1]]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut area = 0.0;
    for w in xs.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let mut ys: Vec<Arc> = rects
            .iter()
            .filter(|r| r[0][0] <= mid && mid <= r[0][1])
            .map(|r| r[1])
            .collect();
        ys.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let mut covered = 0.0;
        let mut cur: Option<Arc> = None;
        for y in ys {
            cur = match cur {
                Some(c) if y[0] <= c[1] => Some([c[0], c[1].max(y[1])]),
                Some(c) => {
                    covered += c[1] - c[0];
                    Some(y)
                }
                None => Some(y),
            };
        }
        if let Some(c) = cur {
            covered += c[1] - c[0];
        }
        area += covered * (w[1] - w[0]);
    }
    area
}
