use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input data that fails the structural or combinatorial conditions.
    #[error("invalid branching data: {0}")]
    Invalid(String),

    /// A configured ceiling would be exceeded; nothing was truncated.
    #[error("capacity exceeded: {what} is {value}, ceiling is {limit}")]
    Capacity {
        what: &'static str,
        value: u128,
        limit: u128,
    },

    /// The boundary bookkeeping produced an inconsistent answer.
    #[error("model violation: {0}")]
    ModelViolation(String),

    #[error("dynamics needs at least 4 marked points, got {0}")]
    TooFewPoints(usize),

    #[error("operation needs exactly 4 target points, got {0}")]
    NotFourPoints(usize),

    #[error("data is not fully marked")]
    NotFullyMarked,

    #[error("not a bijection: {0}")]
    NotABijection(String),

    #[error("position {position} out of range for a tuple of length {len}")]
    Position { position: usize, len: usize },

    #[error("bound contradiction: {0}")]
    BoundContradiction(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown component {0}")]
    UnknownComponent(usize),
}
