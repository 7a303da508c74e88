use qoper_algebra::AlgebraError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("index {k} out of range 1..={n}")]
    OutOfRange { k: usize, n: usize },
    #[error("coordinates {0} and {1} coincide")]
    CoincidentCoordinates(usize, usize),
    #[error("solver found {found} of {expected} solutions")]
    SolverFailed { found: usize, expected: usize },
    #[error("Vandermonde minor is singular (twists collide)")]
    SingularVandermonde,
    #[error("determinant is not divisible by W_{k}")]
    NotDivisible { k: usize },
    #[error("roots {0} and {1} collide up to a factor q^(+-1)")]
    PoleCollision(usize, usize),
    #[error("pole: {0}")]
    Pole(String),
    #[error("indeterminate term: {0}")]
    Indeterminate(String),
    #[error("no fixed point and locus direction make the series terminate for {0}")]
    NoTerminatingFixedPoint(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
