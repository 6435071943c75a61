use thiserror::Error;

/// Errors raised by the library. Every fallible public function returns
/// [`Result`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitCount { n: u32, min: u32, max: u32 },

    #[error("invalid marked bitstring {0:?}")]
    InvalidBitstring(String),

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: u64, dim: u64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parameter vector has length {got}, problem expects {expected}")]
    ParameterLength { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unphysical noise model: {0}")]
    Unphysical(String),

    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
