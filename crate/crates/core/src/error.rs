use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("jet order exhausted: {0}")]
    OrderExhausted(String),
    #[error("singular frame at {point:?} (|det E| = {det:e})")]
    SingularFrame { point: Vec<f64>, det: f64 },
    #[error("metric is not positive definite at {point:?}")]
    MetricNotSpd { point: Vec<f64> },
    #[error("horizontal rank {ell} too small: {what} needs rank >= {required}")]
    RankTooSmall {
        ell: usize,
        required: usize,
        what: &'static str,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error at line {line}: {message}")]
    Validation { line: usize, message: String },
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
