//! q-Pochhammer symbols and multiplicative theta expansions.

use crate::error::{AlgebraError, Result};
use crate::laurent::LaurentPoly;
use crate::ratfunc::RationalFunction;
use crate::series::TruncatedSeries;

/// `(x; q)_d`. For negative `d` this is `1 / prod_{j=1}^{-d} (1 - x q^{-j})`,
/// which keeps `(x;q)_d = (1 - x q^{d-1}) (x;q)_{d-1}` valid for every `d`.
pub fn q_pochhammer(x: &RationalFunction, q: &str, d: i32) -> Result<RationalFunction> {
    let reg = x.registry().union(&crate::Registry::new(&[q]));
    let x = x.to_registry(&reg)?;
    let one = RationalFunction::one(&reg);
    let mut acc = one.clone();
    if d >= 0 {
        for k in 0..d {
            let qk = RationalFunction::var_pow(&reg, q, k)?;
            acc = &acc * &(&one - &(&x * &qk));
        }
        return Ok(acc);
    }
    for j in 1..=(-d) {
        let qj = RationalFunction::var_pow(&reg, q, -j)?;
        let f = &one - &(&x * &qj);
        if f.is_zero() {
            return Err(AlgebraError::DivisionByZero(format!(
                "({x}; {q})_{d}: factor 1 - ({x})*{q}^-{j} vanishes"
            )));
        }
        acc = &acc * &f;
    }
    acc.inv()
}

fn theta_impl(x: &RationalFunction, p: &str, order: u32, with_inverse: bool) -> Result<TruncatedSeries> {
    let reg = x.registry().clone();
    let one = RationalFunction::one(&reg);
    let base = TruncatedSeries::one(&[p], &[order], &reg);
    let xinv = if with_inverse { Some(x.inv()?) } else { None };
    let mut acc = base.constant_like(&one - x);
    for k in 1..=order {
        // (1 - x p^k)
        let f = &base - &base.monomial_like(vec![k], x.clone());
        acc = &acc * &f;
    }
    if let Some(xinv) = xinv {
        for k in 1..=order {
            // (1 - p^k / x)
            let f = &base - &base.monomial_like(vec![k], xinv.clone());
            acc = &acc * &f;
        }
    }
    Ok(acc)
}

/// `prod_{k>=0} (1 - x p^k)(1 - p^{k+1}/x)` through `p^order`.
pub fn theta_expand(x: &RationalFunction, p: &str, order: u32) -> Result<TruncatedSeries> {
    theta_impl(x, p, order, true)
}

/// The same product with the `(1 - p^{k+1}/x)` factors dropped.
pub fn theta_expand_without_inverse(x: &RationalFunction, p: &str, order: u32) -> Result<TruncatedSeries> {
    theta_impl(x, p, order, false)
}

/// `theta_expand` for a monomial given as a polynomial.
pub fn theta_expand_monomial(x: &LaurentPoly, p: &str, order: u32) -> Result<TruncatedSeries> {
    if x.as_monomial().is_none() {
        return Err(AlgebraError::NotMonomial(format!("{x}")));
    }
    theta_expand(&RationalFunction::from(x.clone()), p, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_rational_function as parse;
    use crate::Registry;

    #[test]
    fn small_pochhammers() {
        let reg = Registry::new(&["x", "q"]);
        let x = RationalFunction::var(&reg, "x").unwrap();
        assert!(q_pochhammer(&x, "q", 0).unwrap().is_one());
        assert_eq!(q_pochhammer(&x, "q", 2).unwrap(), parse(&reg, "(1 - x)*(1 - q*x)").unwrap());
        assert_eq!(q_pochhammer(&x, "q", -1).unwrap(), parse(&reg, "1/(1 - x*q^-1)").unwrap());
    }

    #[test]
    fn negative_pochhammer_pole() {
        let reg = Registry::new(&["x", "q"]);
        let q2 = RationalFunction::var_pow(&reg, "q", 2).unwrap();
        assert!(matches!(q_pochhammer(&q2, "q", -3), Err(AlgebraError::DivisionByZero(_))));
        assert!(q_pochhammer(&q2, "q", -1).is_ok());
    }

    #[test]
    fn theta_first_orders() {
        let reg = Registry::new(&["x"]);
        let x = RationalFunction::var(&reg, "x").unwrap();
        let t0 = theta_expand(&x, "p", 0).unwrap();
        assert_eq!(t0.constant_term(), parse(&reg, "1 - x").unwrap());
        assert_eq!(t0.len(), 1);
        let t1 = theta_expand(&x, "p", 1).unwrap();
        assert_eq!(t1.coeff(&[1]), parse(&reg, "-(1 - x)*(x + x^-1)").unwrap());
        let one = RationalFunction::one(&reg);
        assert!(theta_expand(&one, "p", 3).unwrap().is_zero());
    }
}
