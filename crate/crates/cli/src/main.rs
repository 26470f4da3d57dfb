//! `foliate`: scenario runner for the foliation workbench.

mod report;
mod run;
mod scene;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use report::{finish, CliError, EXIT_MALFORMED, EXIT_PIPELINE, EXIT_VALIDATION};
use scene::Template;

#[derive(Debug, Parser)]
#[command(name = "foliate", version, about = "Smoothing, blowup and measure scenarios on flow box scenes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the decomposition conditions of a scene.
    Validate(ValidateArgs),
    /// Smooth the foliation of a scene within a C0 budget.
    Smooth(SmoothArgs),
    /// Blow up leaves of a scene for a sequence of total weights.
    Blowup(BlowupArgs),
    /// Approximate a closed 1-form on a torus by a fibration.
    Tischler(TischlerArgs),
    /// Blow up an irrational rotation of the circle and track its rotation number.
    DenjoyCircle(CircleArgs),
    /// Smooth the transverse measure of a measured scene.
    Measure(MeasureArgs),
    /// Write a scene file from a template.
    Generate(GenerateArgs),
}

#[derive(Debug, Args, Serialize)]
struct Common {
    /// Output directory; receives manifest.json, run_info.json and any CSV series.
    #[arg(long)]
    out: PathBuf,
    /// Recorded in the manifest; every scenario is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub scene: PathBuf,
    /// Also reorder boxes to enforce the ordering condition and write the result.
    #[arg(long)]
    pub enforce: bool,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct SmoothArgs {
    #[arg(long)]
    pub scene: PathBuf,
    /// C0 budget; repeat for an epsilon sweep.
    #[arg(long, num_args = 1.., value_delimiter = ',', default_value = "0.1")]
    pub epsilon: Vec<f64>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct BlowupArgs {
    #[arg(long)]
    pub scene: PathBuf,
    /// C0 budget; weights are halved until every box is within it.
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    /// Heights of the blown-up leaves over the anchor.
    #[arg(long, num_args = 1.., value_delimiter = ',', default_value = "0.40625")]
    pub point: Vec<f64>,
    /// Total weights, one pipeline run each, split evenly over the points.
    #[arg(long, num_args = 1.., value_delimiter = ',', default_value = "0.2,0.1,0.05")]
    pub weights: Vec<f64>,
    /// Shear of the inserted packets `s + shear s (1 - s) sin(2 pi x)`.
    #[arg(long, default_value_t = 0.5)]
    pub packet_shear: f64,
    /// Number of leaves per packet, minus one.
    #[arg(long, default_value_t = 8)]
    pub packet_leaves: usize,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct TischlerArgs {
    /// Coefficients of the constant closed 1-form, two or three.
    #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub coefficients: Vec<f64>,
    /// Angle bound between the kernels, in radians.
    #[arg(long, default_value_t = 1e-4)]
    pub epsilon: f64,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct CircleArgs {
    /// Rotation parameter; defaults to the golden mean.
    #[arg(long, default_value_t = 0.618_033_988_749_894_8)]
    pub alpha: f64,
    #[arg(long, default_value_t = 100_000)]
    pub iterations: usize,
    /// Orbit points `k alpha`, `|k| <= orbit`, that are blown up.
    #[arg(long, default_value_t = 200)]
    pub orbit: usize,
    /// Total length of the inserted gaps before rescaling.
    #[arg(long, default_value_t = 0.5)]
    pub total_weight: f64,
    /// Iterates between CSV rows; must divide the iteration count.
    #[arg(long)]
    pub stride: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct MeasureArgs {
    #[arg(long)]
    pub scene: PathBuf,
    /// JSON transverse measure; defaults to the leafwise Lebesgue measure.
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Uniform samples of the cumulative function used by the spline.
    #[arg(long, default_value_t = 16)]
    pub subsamples: usize,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub template: Template,
    /// Scene file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Grid nodes per base axis.
    #[arg(long, default_value_t = 32)]
    pub resolution: usize,
    /// Number of sampled leaves, minus one.
    #[arg(long, default_value_t = 32)]
    pub leaves: usize,
    /// Shear amplitude; ignored by horizontal-t3.
    #[arg(long, default_value_t = 0.1)]
    pub shear: f64,
    /// Recorded only; templates are deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Runs `body` and writes its manifest; failed checks map to `failing_code`.
fn scenario<A: Serialize>(
    name: &str,
    args: &A,
    common: &Common,
    failing_code: u8,
    body: impl FnOnce(&A, &std::path::Path) -> Result<report::Run, CliError>,
) -> Result<u8, CliError> {
    let mut inputs = serde_json::to_value(args).map_err(|e| CliError::Malformed(e.to_string()))?;
    inputs["seed"] = common.seed.into();
    std::fs::create_dir_all(&common.out).map_err(|e| CliError::Io(common.out.clone(), e))?;
    let outcome = body(args, &common.out);
    finish(name, &common.out, inputs, outcome, failing_code)
}

fn dispatch(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Validate(a) => scenario("validate", &a, &a.common, EXIT_VALIDATION, run::validate),
        Command::Smooth(a) => scenario("smooth", &a, &a.common, EXIT_PIPELINE, run::smooth),
        Command::Blowup(a) => scenario("blowup", &a, &a.common, EXIT_PIPELINE, run::blowup),
        Command::Tischler(a) => scenario("tischler", &a, &a.common, EXIT_PIPELINE, run::tischler),
        Command::DenjoyCircle(a) => scenario("denjoy-circle", &a, &a.common, EXIT_PIPELINE, run::circle),
        Command::Measure(a) => scenario("measure", &a, &a.common, EXIT_PIPELINE, run::measure),
        Command::Generate(a) => run::generate(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_MALFORMED) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("foliate: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
