//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by dataset handling, clustering, and the benchmark harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An input file (data, schema, config) could not be opened.
    #[error("cannot open {path}: {source}")]
    InputFile {
        path: PathBuf,
        source: std::io::Error,
    },

    /// CSV header contains a column the schema does not define, or a schema
    /// column is missing from the header.
    #[error("unknown column '{name}': {detail}")]
    UnknownColumn { name: String, detail: String },

    /// A categorical cell holds a value outside the column's choice list.
    #[error("unknown category '{value}' in column '{column}' (row {row})")]
    UnknownCategory {
        column: String,
        row: usize,
        value: String,
    },

    /// A continuous cell could not be parsed as a finite number.
    #[error("non-numeric value '{value}' in continuous column '{column}' (row {row})")]
    NonNumericContinuous {
        column: String,
        row: usize,
        value: String,
    },

    /// An empty cell; missing values are rejected, not imputed.
    #[error("missing value in column '{column}' (row {row})")]
    MissingValue { column: String, row: usize },

    /// The data file has a header but no rows.
    #[error("dataset is empty")]
    EmptyDataset,

    /// The schema file violates its invariants (duplicate names, too few
    /// categories, ...).
    #[error("invalid schema: {0}")]
    SchemaInvalid(String),

    /// Two points (or a point and a schema) disagree on dimensions.
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    /// A configuration value is out of its legal range.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// The objective returned NaN or an infinity that is not the penalty
    /// sentinel.
    #[error("objective returned a non-finite value")]
    ObjectiveNonFinite,

    /// The separation-aware objective needs at least two centroids.
    #[error("need at least 2 centroids, got {0}")]
    NotEnoughCentroids(usize),

    /// A flat genome has the wrong length for the schema and K.
    #[error("genome length {got} does not match expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    /// Fewer data rows than requested clusters.
    #[error("dataset has {rows} rows, fewer than k = {k}")]
    TooFewRows { rows: usize, k: usize },

    /// A validity index needs at least two nonempty clusters.
    #[error("metric needs at least 2 nonempty clusters, got {0}")]
    TooFewClusters(usize),

    /// A K sweep needs a proper range 2 <= k_min < k_max <= n.
    #[error("invalid K range: {0}")]
    InvalidRange(String),

    /// The elbow rule needs at least three curve points.
    #[error("SSE curve has {0} points, need at least 3")]
    CurveTooShort(usize),

    /// A synthetic generator spec violates its invariants.
    #[error("invalid synth spec: {0}")]
    InvalidSpec(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code class: 1 usage error, 2 data error, 3 runtime error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InputFile { .. }
            | Error::InvalidConfig(_)
            | Error::InvalidRange(_)
            | Error::InvalidSpec(_) => 1,
            Error::UnknownColumn { .. }
            | Error::UnknownCategory { .. }
            | Error::NonNumericContinuous { .. }
            | Error::MissingValue { .. }
            | Error::EmptyDataset
            | Error::SchemaInvalid(_)
            | Error::SchemaMismatch(_)
            | Error::LengthMismatch { .. }
            | Error::TooFewRows { .. }
            | Error::TooFewClusters(_)
            | Error::CurveTooShort(_)
            | Error::Csv(_) => 2,
            Error::ObjectiveNonFinite
            | Error::NotEnoughCentroids(_)
            | Error::Io(_)
            | Error::Json(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
