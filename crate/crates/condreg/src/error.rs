//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or configuration (bad dimensions, out-of-range
    /// indices, empty inputs, inconsistent shapes, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Input data could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Synthetic generation gave up: a sampled row could not be matched to its
    /// drawn satisfaction outcome within the retry budget.
    #[error("row {row}: no assignment with DNF = {want} found in {tries} draws")]
    RowSamplingExhausted { row: usize, want: bool, tries: usize },

    /// Synthetic generation gave up: no acceptable planted DNF within the
    /// retry budget.
    #[error("no acceptable planted DNF after {tries} draws")]
    DnfSamplingExhausted { tries: usize },

    /// Iterative solver failed to reach the requested tolerance. Carries the
    /// best iterate seen and the relative objective gap at the last step.
    #[error("solver did not converge: relative gap {gap:e} after {iterations} iterations")]
    SolverDidNotConverge {
        iterations: usize,
        gap: f64,
        best: Vec<f64>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Shorthand for a [`Error::Parameter`] with a formatted message.
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
