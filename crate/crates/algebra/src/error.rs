use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("expected a monomial, got {0}")]
    NotMonomial(String),
    #[error("series is not invertible: degree-zero coefficient vanishes")]
    NotInvertible,
    #[error("series live in different small-variable sets: {0:?} vs {1:?}")]
    SeriesMismatch(Vec<String>, Vec<String>),
    #[error("operators use different coordinate systems: {0}")]
    MismatchedCoordinates(String),
    #[error("malformed json: {0}")]
    Json(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
