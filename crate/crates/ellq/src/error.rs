//! Error type shared by all evaluators.
//!
//! Every operation rejects out-of-domain input instead of letting a NaN or
//! infinity propagate; the variants mirror the CLI exit codes (domain errors
//! exit 3, calibration ambiguity exits 4).

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum EllqError {
    /// Input violates a precondition of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The argument sits within 1e-12 of a zero of the defining product.
    #[error("singular input: {0}")]
    Singularity(String),

    /// The truncation policy does not allow enough terms for the target
    /// tolerance.
    #[error("truncation budget exceeded: {0}")]
    Truncation(String),

    /// Lattice sum with total weight < 3 (not absolutely convergent).
    #[error("divergent lattice sum: {0}")]
    Divergence(String),

    /// Convention calibration found zero or several viable candidates.
    #[error("calibration ambiguity: {0}")]
    Calibration(String),

    /// A suite or plan name is not registered.
    #[error("unknown name: {0}")]
    Unknown(String),
}

pub type Result<T> = std::result::Result<T, EllqError>;

impl EllqError {
    /// CLI exit code associated with the error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            EllqError::Unknown(_) => 2,
            EllqError::Calibration(_) => 4,
            _ => 3,
        }
    }
}
