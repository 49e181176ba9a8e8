use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum PeError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A structural constraint (hydrostatic space, exponent relation,
    /// mean-free precondition) does not hold.
    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("numerical blow-up at step {step} (t = {time}): {reason}")]
    BlowUp {
        step: usize,
        time: f64,
        reason: String,
    },

    #[error("malformed snapshot: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PeError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(PeError::InvalidInput(msg.into()))
}

pub(crate) fn constraint<T>(msg: impl Into<String>) -> Result<T> {
    Err(PeError::Constraint(msg.into()))
}
