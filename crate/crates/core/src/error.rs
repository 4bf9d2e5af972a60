use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty vector")]
    Empty,

    #[error("entry {index} is {value}, which is not allowed here ({reason})")]
    InvalidEntry {
        index: usize,
        value: String,
        reason: &'static str,
    },

    #[error("weights must satisfy w_i >= 0 and w_1 > 0")]
    InvalidWeights,

    #[error("normalized weights must be positive and sum to 1")]
    InvalidNormalizedWeights,

    #[error("order {r} out of range for dimension {n}")]
    OrderOutOfRange { r: i64, n: usize },

    #[error("index {n} out of range (allowed {min}..={max})")]
    IndexOutOfRange { n: usize, min: usize, max: usize },

    #[error("value is not provably positive (required by {0})")]
    NotPositive(&'static str),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("retry budget of {budget} exhausted while sampling {what}")]
    RetryBudgetExhausted { what: &'static str, budget: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
