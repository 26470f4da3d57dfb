//! Flow box decompositions of `T^3` by axis-aligned boxes: scenes,
//! validation of conditions (1) to (6), subdivision, face poset and
//! regular neighbourhoods.

mod complex;
mod enforce;
pub mod geometry;
mod neighborhood;
mod poset;
mod validate;

pub use complex::{
    build_torus_scene, reference_family, split_scene, DecompositionComplex, Face, FlowBoxSpec,
    HeightSplit, SceneKind, Side, SplitOrder, GLOBAL, SCHEMA_VERSION,
};
#[allow(unused_imports)]
pub(crate) use complex::{box_window, grid_index, leaf_index};
pub use enforce::{enforce_condition5, EnforceReport};
pub use neighborhood::{
    regular_neighborhood, EdgeNeighborhood, FaceNeighborhood, NeighborhoodWidths,
    RegularNeighborhoodStructure, VerticalEdge,
};
pub use poset::{maximal_faces, FacePoset, PosetFace};
pub use validate::{
    check_transitive, validate, ConditionReport, FaceRef, TransitivityReport, ValidationReport, Witness,
};
