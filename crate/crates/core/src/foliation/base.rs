use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseShape {
    /// `[0, lx] x [0, ly]`.
    Rectangle,
    /// `[0, lx] x S^1`, periodic in the second coordinate.
    Annulus,
    /// A 2-cell modelled on the square `[0, lx] x [0, ly]`; its boundary
    /// collar plays the role of the annulus `A`.
    Disk,
    /// `S^1 x S^1`, the base of the torus scenes.
    Torus,
}

impl BaseShape {
    pub fn periodic(self) -> [bool; 2] {
        match self {
            BaseShape::Rectangle | BaseShape::Disk => [false, false],
            BaseShape::Annulus => [false, true],
            BaseShape::Torus => [true, true],
        }
    }
}

/// Sampled base `D` of a flow box `D x I`.
///
/// Non-periodic axes carry `n` nodes including both ends; periodic axes
/// carry `n` nodes `0, L/n, ..., (n-1)L/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseDomain {
    pub shape: BaseShape,
    pub resolution: [usize; 2],
    pub extent: [f64; 2],
}

pub const MIN_AXIS_RESOLUTION: usize = 8;

impl BaseDomain {
    pub fn new(shape: BaseShape, resolution: [usize; 2], extent: [f64; 2]) -> Result<Self> {
        Self::with_min(shape, resolution, extent, MIN_AXIS_RESOLUTION)
    }

    /// Unit-square (or unit-torus) base with `n` nodes per axis.
    pub fn unit(shape: BaseShape, n: usize) -> Result<Self> {
        Self::new(shape, [n, n], [1.0, 1.0])
    }

    /// Windows cut from a larger base may be thinner than the public minimum.
    pub(crate) fn with_min(
        shape: BaseShape,
        resolution: [usize; 2],
        extent: [f64; 2],
        min: usize,
    ) -> Result<Self> {
        for axis in 0..2 {
            if resolution[axis] < min {
                return Err(Error::ResolutionTooLow {
                    got: resolution[axis],
                    min,
                });
            }
            if !(extent[axis] > 0.0 && extent[axis].is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "extent {} must be positive",
                    extent[axis]
                )));
            }
        }
        Ok(Self {
            shape,
            resolution,
            extent,
        })
    }

    pub fn nx(&self) -> usize {
        self.resolution[0]
    }

    pub fn ny(&self) -> usize {
        self.resolution[1]
    }

    pub fn node_count(&self) -> usize {
        self.resolution[0] * self.resolution[1]
    }

    pub fn periodic(&self) -> [bool; 2] {
        self.shape.periodic()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let n = self.resolution[axis];
        if self.periodic()[axis] {
            self.extent[axis] / n as f64
        } else {
            self.extent[axis] / (n - 1) as f64
        }
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        i as f64 * self.spacing(axis)
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [self.coord(0, i), self.coord(1, j)]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.resolution[1] + j
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let ny = self.resolution[1];
        (0..self.resolution[0]).flat_map(move |i| (0..ny).map(move |j| (i, j)))
    }

    /// Neighbours used by central differences along `axis`, with the step
    /// length between them. One-sided at non-periodic edges.
    pub(crate) fn stencil(&self, axis: usize, i: usize) -> (usize, usize, f64) {
        let n = self.resolution[axis];
        let h = self.spacing(axis);
        if self.periodic()[axis] {
            ((i + n - 1) % n, (i + 1) % n, 2.0 * h)
        } else if i == 0 {
            (0, 1, h)
        } else if i == n - 1 {
            (n - 2, n - 1, h)
        } else {
            (i - 1, i + 1, 2.0 * h)
        }
    }

    /// Cell containing `coord` along `axis`: lower node, upper node, and the
    /// fractional position between them.
    pub(crate) fn locate(&self, axis: usize, coord: f64) -> (usize, usize, f64) {
        let n = self.resolution[axis];
        let h = self.spacing(axis);
        if self.periodic()[axis] {
            let l = self.extent[axis];
            let c = coord.rem_euclid(l);
            let s = c / h;
            let lo = (s.floor() as usize).min(n - 1);
            (lo, (lo + 1) % n, s - lo as f64)
        } else {
            let c = coord.clamp(0.0, self.extent[axis]);
            let s = c / h;
            let lo = (s.floor() as usize).min(n - 2);
            (lo, lo + 1, s - lo as f64)
        }
    }

    /// Whether `p` lies in the closed base (always true along periodic axes).
    pub fn contains(&self, p: [f64; 2]) -> bool {
        (0..2).all(|a| {
            self.periodic()[a] || (p[a] >= -1e-12 && p[a] <= self.extent[a] + 1e-12)
        })
    }
}
