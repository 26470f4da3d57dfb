use thiserror::Error;

/// Errors raised by constructions in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resolution {got} below minimum {min}")]
    ResolutionTooLow { got: usize, min: usize },

    #[error("invalid insertion schedule: {0}")]
    InvalidSchedule(String),

    #[error("inserted intervals overlap at entries {first} and {second}")]
    OverlappingInsertion { first: usize, second: usize },

    #[error("invalid leaf family: {0}")]
    InvalidFamily(String),

    #[error("leaf families live on different bases")]
    BaseMismatch,

    #[error("adjacent sampled leaves {lower} and {upper} already differ by {angle:.3e} rad (> {epsilon:.3e}); refine the t-grid")]
    PartitionTooCoarse {
        lower: usize,
        upper: usize,
        angle: f64,
        epsilon: f64,
    },

    #[error("holonomy disagreement along path {path}: sup defect {defect:.6e}")]
    HolonomyMismatch { path: usize, defect: f64 },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("leaf family is not strictly horizontal (max deviation {deviation:.3e})")]
    NotHorizontal { deviation: f64 },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("C0 budget {epsilon:.3e} not met after {retries} retries (achieved {achieved:.3e})")]
    BudgetExceeded {
        epsilon: f64,
        achieved: f64,
        retries: usize,
    },

    #[error("stage `{stage}` failed on {region}: {source}")]
    Stage {
        stage: String,
        region: String,
        #[source]
        source: Box<Error>,
    },

    #[error("decomposition does not satisfy condition ({condition}): {detail}")]
    Decomposition { condition: u8, detail: String },

    #[error("regular neighborhood widths rejected: {0}")]
    Neighborhood(String),

    #[error("transverse measure: {0}")]
    Measure(String),

    #[error("rational rotation parameter {0} produces orbit collisions")]
    RationalRotation(f64),

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    pub(crate) fn in_stage(self, stage: &str, region: impl Into<String>) -> Error {
        Error::Stage {
            stage: stage.to_string(),
            region: region.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
