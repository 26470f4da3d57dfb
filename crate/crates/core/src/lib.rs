//! Product foliations on flow boxes, their smoothing, flow box
//! decompositions of the 3-torus, Denjoy blowups and measured foliations.

pub mod decomposition;
pub mod denjoy;
pub mod error;
pub mod foliation;
pub mod kernel;
pub mod measure;
pub mod smoothing;
pub mod tolerance;

pub use error::{Error, Result};
pub use foliation::{BaseDomain, BaseShape, BasePath, HolonomyMap, LeafFamily};
pub use kernel::{CollapseMap, DampingProfile, InsertionSchedule, Partition};
