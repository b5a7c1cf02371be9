//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by corpus handling, model training, spectral analysis,
/// and clustering.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed manifest at line {line}: {reason}")]
    ManifestParse { line: usize, reason: String },

    #[error("duplicate id {0:?} in manifest")]
    DuplicateId(String),

    #[error("gap in reconstruction: expected offset {expected}, next part starts at {found}")]
    ReconstructGap { expected: usize, found: usize },

    #[error("overlap in reconstruction: part starting at {start} overlaps previous end {previous_end}")]
    ReconstructOverlap { start: usize, previous_end: usize },

    #[error("synthetic languages {0:?} and {1:?} have overlapping alphabets")]
    OverlappingAlphabets(String, String),

    #[error("synthetic generator: {0}")]
    InvalidGeneratorSpec(String),

    #[error("n-gram order must be at least 1, got {0}")]
    InvalidOrder(usize),

    #[error("smoothing constant must be positive, got {0}")]
    InvalidSmoothing(f64),

    #[error("invalid n-gram range [{0}, {1}]")]
    InvalidNgramRange(usize, usize),

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),

    #[error("no training segments provided")]
    EmptyTrainingSet,

    #[error("label {0:?} has no characters in the training data")]
    EmptyLabel(String),

    #[error("empty test set")]
    EmptyTestSet,

    #[error("non-finite training loss at epoch {epoch}, step {step}")]
    NonFiniteLoss { epoch: usize, step: usize },

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("empty window grid for document {0:?}")]
    EmptyGrid(String),

    #[error("empty signal")]
    EmptySignal,

    #[error("signal of length {0} is too short for spectrum features (minimum 4)")]
    SignalTooShort(usize),

    #[error("bin count {0} is too small (minimum 8)")]
    BinCountTooSmall(usize),

    #[error("cannot fit {k} clusters to {points} points")]
    TooFewPoints { k: usize, points: usize },

    #[error("feature dimensionality mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("elbow scan needs a k range spanning at least 3 values, got [{0}, {1}]")]
    ElbowRangeTooNarrow(usize, usize),

    #[error("unsupported model file: {0}")]
    BadModelFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
