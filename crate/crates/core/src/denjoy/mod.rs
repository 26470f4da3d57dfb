//! Denjoy blowup of leaves in flow boxes and scenes, its verification, and
//! the circle-map shadow.

mod blowup;
mod circle;
mod data;
mod verify;

pub use blowup::{
    blowup_box, blowup_scene, box_compatibility, glued_holonomy_defect, scene_distance, BlowupLocus,
    BlownScene,
};
pub use circle::{
    blowup_circle_map, rotation_number, rotation_trace, wandering_audit, CircleMapLift, RotationEstimate,
    RotationSample, WanderingAudit, MIN_ITERATIONS, MIN_ORBIT,
    WeightRule,
};
pub use data::{
    CollapseData, CollapseDataSummary, CollapseSegment, PacketEmbedding, PacketSummary, SegmentSummary,
};
pub use verify::{verify_blowup, verify_family_blowup, BlowupReport, PropertyCheck};
