//! Almost horizontal product foliations on flow boxes `D x I`.

mod base;
mod family;
mod holonomy;
mod tangent;
mod window;

pub use base::{BaseDomain, BaseShape, MIN_AXIS_RESOLUTION};
pub(crate) use family::mix;
pub use family::{leaf_through, uniform_ts, LeafFamily};
pub use holonomy::{holonomy, holonomy_between, x_invariance_defect, BasePath, HolonomyMap};
pub use tangent::{
    c0_distance, c0_distance_band, c0_distance_where, graph_normal, normal_angle, normal_at, tangent_field,
    tangent_field_at, TangentPlaneField,
};
pub use window::Window;
