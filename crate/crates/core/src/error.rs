use std::path::PathBuf;

/// Errors returned by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative method did not reach its tolerance within the allowed budget.
    #[error("no convergence after {iterations} iterations: {what}")]
    NonConvergence { what: String, iterations: usize },
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Two sequences that must be aligned have different lengths.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    /// An input sequence was empty.
    #[error("empty input: {0}")]
    Empty(&'static str),
    /// A value could not be parsed.
    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },
    /// Parsed data violates a validation rule.
    #[error("validation error{}: {message}", row.map(|r| format!(" at row {r}")).unwrap_or_default())]
    Validation { row: Option<usize>, message: String },
    /// The same period appears twice.
    #[error("duplicate period '{period}' at row {row}")]
    DuplicatePeriod { period: String, row: usize },
    /// MAPE is undefined when an actual value is zero.
    #[error("actual value is zero at index {0}")]
    ZeroActual(usize),
    /// Not enough observations for the requested model.
    #[error("series too short: need at least {needed}, got {got}")]
    TooShort { needed: usize, got: usize },
    /// The fitted polynomial has roots on or inside the unit circle.
    #[error("unstable roots in {0} polynomial")]
    UnstableRoots(&'static str),
    /// The observation sequence has zero probability under the model.
    #[error("observation sequence has zero probability (first impossible step {step})")]
    ZeroProbability { step: usize },
    /// An HMM state lost all its mass or its emission spread fell below the floor.
    #[error("state {state} collapsed at iteration {iteration}")]
    StateCollapse { state: usize, iteration: usize },
    /// Requested more peaks than the spectrum has positive-frequency bins.
    #[error("requested {requested} peaks but only {available} bins exist")]
    TooManyPeaks { requested: usize, available: usize },
    /// A criterion has identical ideal and anti-ideal values.
    #[error("degenerate criterion {0}: ideal equals anti-ideal")]
    DegenerateCriterion(usize),
    /// A criterion column is all zero and cannot be vector-normalized.
    #[error("criterion {0} is all zero")]
    ZeroColumn(usize),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
