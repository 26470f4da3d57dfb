//! Smoothing and extension operators on leaf families.

mod constraint;
mod interp;
mod local;
mod pipeline;
mod region;

pub use constraint::{core_path, smooth_with_holonomy_constraint, ConstrainedSmoothing};
pub use interp::{interpolate_on, smooth_in_t, SmoothedFamily};
pub use local::{
    damped_cone, generating_loops, local_damped_replace, resample, straightening_isotopy,
    x_invariant_normalize, ConeOutcome, IsotopyTrace, TraceReport, TRACE_SLICES,
};
pub use pipeline::{box_distance, globally_smooth, GlobalSmoothing, StageReport};
pub use region::RegionMask;
