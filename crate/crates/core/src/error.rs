//! Error and result types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by dataset generation, model evaluation, fitting and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or range failed validation.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A numerical quantity left its admissible domain (negative barrier
    /// product, non-finite intermediate, zero normalization, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The implicit threshold solve did not reach the requested tolerance.
    #[error(
        "fixed-point iteration did not converge within {iterations} iterations \
         (last iterate {last} V, residual {residual} V)"
    )]
    Convergence {
        iterations: usize,
        last: f64,
        residual: f64,
    },

    /// A regressor column is numerically in the span of earlier columns.
    #[error("regressor column {column} is numerically dependent on earlier columns")]
    SingularColumn { column: usize },

    /// The normal-equation system could not be solved.
    #[error("singular system: {0}")]
    SingularSystem(String),

    /// Vector or matrix shapes do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A per-row operation failed; carries the offending row index.
    #[error("row {row}: {source}")]
    AtRow {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    /// A runtime measurement was unusable (non-positive timing, checksum drift).
    #[error("measurement error: {0}")]
    Measurement(String),

    /// Malformed or incomplete input data (CSV schema, model file contents).
    #[error("data error: {0}")]
    Data(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wraps an error with the dataset row it occurred at.
    pub fn at_row(self, row: usize) -> Self {
        Error::AtRow {
            row,
            source: Box::new(self),
        }
    }
}
