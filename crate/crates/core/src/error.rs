use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search budget of {budget} nodes exhausted (best size so far {best})")]
    BudgetExhausted { budget: u64, best: usize },

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error(transparent)]
    Set(#[from] SetError),
}

/// Reasons a sequence of integers is not a valid candidate set.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("out of range: {value} is not in [1, {n_limit}]")]
    OutOfRange { value: u64, n_limit: u64 },

    #[error("unsorted: {value} follows {previous}")]
    Unsorted { previous: u64, value: u64 },

    #[error("duplicate: {value} appears more than once")]
    Duplicate { value: u64 },

    #[error("line {line}: cannot parse {text:?} as a positive integer")]
    Parse { line: usize, text: String },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
