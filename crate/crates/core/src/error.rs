use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GkError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported ring map {0}")]
    UnsupportedRingMap(String),
    #[error("degree cap {cap} exceeded")]
    CapExceeded { cap: usize },
    #[error("boundary loss: {0}")]
    BoundaryLoss(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

impl GkError {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            GkError::Parse(_) => 2,
            GkError::Inconsistency(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, GkError>;
