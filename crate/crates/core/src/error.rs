use std::io;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("solver degenerate: {0}")]
    SolverDegenerate(String),
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("incomparable hashes: {0} vs {1}")]
    IncomparableHash(String, String),
    #[error("singular design matrix (numerical rank {rank} < {cols} columns)")]
    SingularDesign { rank: usize, cols: usize },
    #[error("under-determined mask: {rows} mask rows for {predictors} predictors")]
    UnderdeterminedMask { rows: usize, predictors: usize },
    #[error("format error: {0}")]
    Format(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}
