use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("function is not invertible: value at the identity is {0}")]
    NotInvertible(String),

    #[error("invalid quadratic field parameter d = {0}: {1}")]
    InvalidField(i64, &'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("class number estimate {estimate:.4} is not within {tolerance} of an integer")]
    Inconclusive { estimate: f64, tolerance: f64 },

    #[error("unknown atom label `{0}`")]
    UnknownLabel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
