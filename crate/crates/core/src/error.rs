use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("invalid exponent {0}: must exceed 1")]
    InvalidExponent(f64),

    #[error("invalid coefficient {0}: must be positive and finite")]
    InvalidCoefficient(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty grid")]
    EmptyGrid,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value {value} at {location}")]
    NonFinite { value: f64, location: String },

    #[error("probe {0:?} lies outside the closed positive orthant")]
    ProbeOutsideOrthant(Vec<f64>),

    #[error("zero direction vector")]
    ZeroDirection,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unbounded: {0}")]
    Unbounded(String),

    #[error("missing moment for multi-index {0:?}")]
    MissingMoment(Vec<u32>),

    #[error("weight `{0}` has no conjugate available")]
    NoConjugate(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
