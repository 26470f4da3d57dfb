//! Transverse measures on product foliations, their smoothing, and
//! rational approximation of linear measured foliations on tori.

mod scene;
mod spline;
mod tischler;
mod transverse;

pub use scene::{scene_paths, smooth_measured_scene, MeasuredSmoothing, INPUT_INVARIANCE};
pub use spline::PchipSpline;
pub use tischler::{
    convergents, kernel_angle, tischler_fibration, ClosedLeafCertificate, ClosedOneForm, Convergent,
    TischlerFibration,
};
pub use transverse::{
    smooth_measure_on_transversal, verify_invariance, Cumulative, MeasureKind, TransversalSmoothing,
    TransverseMeasure, INVARIANCE_SAMPLES, MIN_SUBSAMPLES,
};
