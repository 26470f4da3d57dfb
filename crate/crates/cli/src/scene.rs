use std::f64::consts::TAU;
use std::path::Path;

use clap::ValueEnum;
use foliate_core::decomposition::{
    build_torus_scene, reference_family, split_scene, DecompositionComplex, SplitOrder, SCHEMA_VERSION,
};
use foliate_core::foliation::uniform_ts;
use foliate_core::{BaseDomain, BaseShape, LeafFamily};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::report::{read, CliError};

/// A single flow box over an annulus, stored with its leaf family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxScene {
    pub schema_version: u32,
    pub kind: String,
    pub family: LeafFamily,
}

pub const ANNULUS_BOX: &str = "annulus-box";

#[derive(Debug, Clone, PartialEq)]
pub enum SceneFile {
    Torus(DecompositionComplex),
    Box(BoxScene),
}

impl SceneFile {
    pub fn to_json(&self) -> String {
        match self {
            SceneFile::Torus(c) => c.to_json(),
            SceneFile::Box(b) => serde_json::to_string_pretty(b).expect("scene serializes"),
        }
    }

    pub fn torus(self) -> Result<DecompositionComplex, CliError> {
        match self {
            SceneFile::Torus(c) => Ok(c),
            SceneFile::Box(_) => Err(CliError::Malformed("this scenario needs a torus scene".into())),
        }
    }
}

/// Reads a scene file, dispatching on its `kind` field.
pub fn load(path: &Path) -> Result<SceneFile, CliError> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Malformed(e.to_string()))?;
    match value.get("kind").and_then(Value::as_str) {
        Some("torus") => Ok(SceneFile::Torus(DecompositionComplex::from_json(&text)?)),
        Some(ANNULUS_BOX) => {
            let b: BoxScene = serde_json::from_value(value).map_err(|e| CliError::Malformed(e.to_string()))?;
            if b.schema_version != SCHEMA_VERSION {
                return Err(CliError::Malformed(format!(
                    "unsupported schema version {}",
                    b.schema_version
                )));
            }
            Ok(SceneFile::Box(b))
        }
        Some(k) => Err(CliError::Malformed(format!("unknown scene kind `{k}`"))),
        None => Err(CliError::Malformed("scene has no `kind` field".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Template {
    /// 2 x 2 boxes over the horizontal foliation of the 3-torus.
    HorizontalT3,
    /// 2 x 2 boxes over `t + shear t (1 - t) sin(2 pi x)`.
    ShearedT3,
    /// Five boxes, cell `b00` split at height 1/2, listed so that the
    /// full-height neighbour comes last.
    SplitT3,
    /// One box over the annulus with leaves `t + shear t (1 - t) sin(2 pi y)`.
    AnnulusBox,
}

/// Builds the scene for `template` on an `n x n` grid with `m + 1` leaves.
pub fn generate(template: Template, n: usize, m: usize, shear: f64) -> Result<SceneFile, CliError> {
    Ok(match template {
        Template::HorizontalT3 => SceneFile::Torus(build_torus_scene(2, 2, &[], Some(reference_family(n, m, 0.0)?))?),
        Template::ShearedT3 => SceneFile::Torus(build_torus_scene(2, 2, &[], Some(reference_family(n, m, shear)?))?),
        Template::SplitT3 => SceneFile::Torus(split_scene(SplitOrder::NeighbourLast, Some(reference_family(n, m, shear)?))?),
        Template::AnnulusBox => {
            let base = BaseDomain::unit(BaseShape::Annulus, n)?;
            let family = LeafFamily::from_fn(base, uniform_ts(m), [0, 0], |t, _, y| {
                t + shear * t * (1.0 - t) * (TAU * y).sin()
            })?;
            SceneFile::Box(BoxScene {
                schema_version: SCHEMA_VERSION,
                kind: ANNULUS_BOX.into(),
                family,
            })
        }
    })
}

/// The family whose leaves the scene carries: the global family of a torus
/// scene, or the box family.
pub fn family_of(scene: &SceneFile) -> Option<&LeafFamily> {
    match scene {
        SceneFile::Torus(c) => c.global_family(),
        SceneFile::Box(b) => Some(&b.family),
    }
}
