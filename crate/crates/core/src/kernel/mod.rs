//! Scalar building blocks: damping profiles, partitions and collapse maps.

mod collapse;
mod damping;
mod partition;

pub use collapse::{
    build_collapse, collapse_preimage, CollapseMap, CollapseSummary, CollapsedInterval,
    InsertionSchedule, Preimage,
};
pub use damping::{
    exp_bump, exp_bump_derivative, exp_bump_inverse, make_damping, DampingKind, DampingProfile,
    MIN_RESOLUTION,
};
pub use partition::{choose_partition, choose_partition_fixed, partition_spread, Partition};
