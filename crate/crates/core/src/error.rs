use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the shapelet learning pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("empty input: {0}")]
    Empty(String),
    #[error("ragged rows: line {line} has {found} values, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: cannot parse {token:?} as a number")]
    Parse { line: usize, token: String },
    #[error("non-finite value on line {line}")]
    NonFinite { line: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("missing labels: {0}")]
    MissingLabels(String),
    #[error(
        "training diverged at iteration {iteration} (loss {loss}); try a smaller learning rate"
    )]
    Diverged { iteration: usize, loss: f64 },
    #[error("model format: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
