use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// `row` and `column` are 1-based data coordinates (header excluded).
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("dataset needs at least 2 rows and 1 column, got {rows}x{cols}")]
    EmptyDataset { rows: usize, cols: usize },

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unsupported metric `{0}`")]
    UnsupportedMetric(String),

    #[error("invalid k = {k}, expected 1..={n}")]
    InvalidK { k: usize, n: usize },

    #[error("cluster index {index} out of range for {k} clusters")]
    IndexOutOfRange { index: usize, k: usize },

    #[error("within-cluster dispersion is zero at k = {k}")]
    DegenerateDispersion { k: usize },

    #[error("non-positive dispersion {value} at k = {k} under a log variant")]
    NonPositiveDispersion { k: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("rectangle sides must be positive and finite, got {a} x {b}")]
    NonPositiveSide { a: f64, b: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("partition has {0} clusters, expected 2")]
    NotTwoClusters(usize),

    #[error("invalid unequal-size row {0}, expected 1..=5")]
    InvalidRow(usize),

    #[error("reports disagree on {0}")]
    HeterogeneousReports(String),

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
