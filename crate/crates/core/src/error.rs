use std::path::PathBuf;

use crate::indexes::IndexName;

/// Errors produced by clustbench.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        path: PathBuf,
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("{path}: row {row}, column '{column}': cannot parse '{value}' as a number")]
    NonNumeric {
        path: PathBuf,
        row: usize,
        column: String,
        value: String,
    },

    #[error("truth column '{0}' has only one distinct value")]
    SingleClassTruth(String),

    #[error("truth column '{0}' not found")]
    UnknownColumn(String),

    #[error("column '{0}' has no non-missing values")]
    FullyMissingColumn(String),

    #[error("column '{0}' has zero variance; drop it or disable scaling")]
    ConstantColumn(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("empty label vector")]
    EmptyPartition,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid cluster count K={k} for n={n}")]
    InvalidK { k: usize, n: usize },

    #[error("index {index} undefined: {reason}")]
    IndexUndefined { index: IndexName, reason: String },

    #[error("kernel radius is zero (too many duplicate points); jitter the data or raise the quantile level")]
    ZeroKernelRadius,

    #[error("pooled standard deviation is zero; index cannot be calibrated")]
    ZeroPooledSd,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("method map unavailable: {0}")]
    Pca(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn undefined(index: IndexName, reason: impl Into<String>) -> Self {
        Error::IndexUndefined {
            index,
            reason: reason.into(),
        }
    }
}
