use thiserror::Error;

/// Errors produced by the scattering, channel and capacity routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not unitary (max |S^dagger S - 1| = {defect:.3e})")]
    NonUnitary { defect: f64 },

    #[error("S/T conversion unavailable: {0}")]
    ConversionUnavailable(String),

    #[error("geometric series diverges (operator norm {norm:.6} >= 1)")]
    SeriesDivergent { norm: f64 },

    #[error("physical and fictitious slots are coupled (max coupling {coupling:.3e})")]
    DecouplingViolation { coupling: f64 },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
