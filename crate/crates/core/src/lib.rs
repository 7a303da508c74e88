//! tRS operators and their duality with q-opers, Macdonald polynomials as
//! truncated vertex functions, and the DELL/eRS elliptic tier.

pub mod dell;
pub mod error;
pub mod numeric;
pub mod macdonald;
pub mod qoper;
pub mod vertex;
pub mod trs;

pub use error::{Error, Result};
