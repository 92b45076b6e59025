use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rank deficient input: numerical rank {rank}, need {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(
        "unequal subspace dimensions: point {index} has dimension {found}, expected {expected}"
    )]
    UnequalDimensions {
        index: usize,
        found: usize,
        expected: usize,
    },

    #[error("basis is not orthonormal (|XᵀX - I|_F = {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("logarithm undefined: target lies on the cut locus of the base point{}", index.map(|i| format!(" (data point {i})")).unwrap_or_default())]
    LogUndefined { index: Option<usize> },

    #[error("tangent is not horizontal (|YᵀΔ|_F = {deviation:.3e})")]
    NotHorizontal { deviation: f64 },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid weight {value} at index {index}: weights must be strictly positive")]
    InvalidWeight { index: usize, value: f64 },

    #[error("codebook size {requested} exceeds the number of data points {available}")]
    TooManyCenters { requested: usize, available: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed file {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
