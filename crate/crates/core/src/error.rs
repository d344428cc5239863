use thiserror::Error;

/// Errors raised when a state, element or configuration violates its contract.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoonError {
    #[error("occupation vector has {got} modes, state has {expected}")]
    ModeCountMismatch { expected: usize, got: usize },

    #[error("mode index {mode} out of range for {mode_count}-mode state")]
    InvalidMode { mode: usize, mode_count: usize },

    #[error("element uses mode {0} more than once")]
    RepeatedMode(usize),

    #[error("d must be a power of two (got d = {0})")]
    NotPowerOfTwo(usize),

    #[error("{0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, NoonError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(NoonError::InvalidParameter(msg.into()))
}
