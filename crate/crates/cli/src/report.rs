use std::fs;
use std::path::{Path, PathBuf};

use foliate_core::Error;
use serde::Serialize;
use serde_json::Value;

pub const MANIFEST_SCHEMA: u32 = 1;

pub const EXIT_OK: u8 = 0;
pub const EXIT_PIPELINE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_MALFORMED: u8 = 3;

/// One invariant check recorded in a manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

impl Check {
    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            passed,
            value: None,
            bound: None,
        }
    }

    /// Passes when `value <= bound`; NaN fails.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= bound,
            value: Some(value),
            bound: Some(bound),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub stage: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    pub message: String,
}

/// Everything a scenario produced; turned into a manifest by [`finish`].
#[derive(Debug, Default)]
pub struct Run {
    pub results: Value,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: String,
    pub exit_code: u8,
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

#[derive(Debug, Serialize)]
struct RunInfo {
    schema_version: u32,
    command: String,
    timestamp: String,
    version: &'static str,
}

/// Scenario error carrying the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Malformed(String),
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Malformed(m) => write!(f, "malformed input: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Malformed(_) | CliError::Io(..) => EXIT_MALFORMED,
            CliError::Core(e) => match e {
                Error::Malformed(_)
                | Error::InvalidParameter(_)
                | Error::InvalidSchedule(_)
                | Error::ResolutionTooLow { .. } => EXIT_MALFORMED,
                Error::Decomposition { .. } | Error::InvalidFamily(_) => EXIT_VALIDATION,
                _ => EXIT_PIPELINE,
            },
        }
    }

    pub fn failure(&self, command: &str) -> Failure {
        match self {
            CliError::Core(Error::Stage { stage, region, source }) => Failure {
                stage: stage.clone(),
                region: Some(region.clone()),
                message: source.to_string(),
            },
            CliError::Core(Error::Decomposition { .. }) => Failure {
                stage: "validate".into(),
                region: None,
                message: self.to_string(),
            },
            _ => Failure {
                stage: command.into(),
                region: None,
                message: self.to_string(),
            },
        }
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Malformed(e.to_string()))?;
    text.push('\n');
    write(path, &text)
}

/// Writes `rows` as a CSV file with a header row.
pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(path.to_path_buf(), std::io::Error::other(e));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// Writes `manifest.json` and `run_info.json` into `out` and returns the
/// exit code: failed checks turn a successful run into `failing_code`.
pub fn finish(
    command: &str,
    out: &Path,
    inputs: Value,
    outcome: Result<Run, CliError>,
    failing_code: u8,
) -> Result<u8, CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(out.to_path_buf(), e))?;
    let manifest = match outcome {
        Ok(run) => {
            let failed: Vec<&str> = run.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            let failure = (!failed.is_empty()).then(|| Failure {
                stage: "verify".into(),
                region: None,
                message: format!("failed checks: {}", failed.join(", ")),
            });
            Manifest {
                schema_version: MANIFEST_SCHEMA,
                command: command.into(),
                exit_code: if failure.is_some() { failing_code } else { EXIT_OK },
                inputs,
                results: run.results,
                checks: run.checks,
                artifacts: run.artifacts,
                failure,
            }
        }
        Err(e) => Manifest {
            schema_version: MANIFEST_SCHEMA,
            command: command.into(),
            exit_code: e.exit_code(),
            inputs,
            results: Value::Null,
            checks: Vec::new(),
            artifacts: Vec::new(),
            failure: Some(e.failure(command)),
        },
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    write_json(
        &out.join("run_info.json"),
        &RunInfo {
            schema_version: MANIFEST_SCHEMA,
            command: command.into(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            version: env!("CARGO_PKG_VERSION"),
        },
    )?;
    if let Some(f) = &manifest.failure {
        match &f.region {
            Some(r) => eprintln!("{command}: stage `{}` failed on {r}: {}", f.stage, f.message),
            None => eprintln!("{command}: stage `{}` failed: {}", f.stage, f.message),
        }
    }
    Ok(manifest.exit_code)
}
