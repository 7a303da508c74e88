//! Exact arithmetic for q-difference computations.
//!
//! Everything here is exact: rational scalars, sparse Laurent polynomials,
//! rational functions with factored denominators, truncated power series in a
//! few small parameters, and shift operators over either coefficient kind.

pub mod error;
pub mod json;
pub mod laurent;
mod modp;
pub mod parse;
pub mod random;
pub mod ratfunc;
pub mod registry;
pub mod series;
pub mod shift;
pub mod special;

pub type Rational = num_rational::BigRational;

pub use error::{AlgebraError, Result};
pub use laurent::{grlex_cmp, Exponent, LaurentPoly, MonomialMap};
pub use parse::{parse_polynomial, parse_rational_function};
pub use ratfunc::RationalFunction;
pub use registry::Registry;
pub use series::TruncatedSeries;
pub use shift::{Coefficient, ShiftOperator};
pub use special::{q_pochhammer, theta_expand, theta_expand_without_inverse};

/// `n` as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// `n / d` as a rational. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
