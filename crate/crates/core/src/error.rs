use thiserror::Error;

use crate::model::ValidationReport;
use crate::sssp::SsspError;

#[derive(Debug, Error)]
pub enum RecoveryError {
    #[error("invalid instance: {0}")]
    InvalidInstance(ValidationReport),

    #[error("missing {0}")]
    MissingData(&'static str),

    #[error("dimension mismatch: {what} has length {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid speed model: {0}")]
    InvalidSpeedModel(String),

    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    ShortestPath(#[from] SsspError),
}
