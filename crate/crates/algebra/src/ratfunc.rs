//! Rational functions with a factored denominator.
//!
//! The denominator is kept as a product of normalized factors ("atoms"):
//! polynomials with no monomial content and grlex-leading coefficient `+1`.
//! Addition takes the least common multiple of the factor lists, so sums of
//! many terms sharing the same poles stay small. After every operation the
//! numerator is trial-divided by each atom, which cancels exactly the common
//! factors that the formulas of this workbench produce. Full multivariate gcd
//! is never computed; equality is decided by cross-multiplication.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};


use crate::error::{AlgebraError, Result};
use crate::laurent::{forward_owned, LaurentPoly, MonomialMap};
use crate::registry::Registry;
use crate::Rational;

type Atom = Arc<LaurentPoly>;

#[derive(Clone)]
pub struct RationalFunction {
    num: LaurentPoly,
    /// Sorted by atom, exponents > 0.
    den: Vec<(Atom, u32)>,
}

/// Splits `p = scalar * x^mono * atom`. `atom` is `None` when `p` is a monomial.
fn normalize_atom(p: &LaurentPoly) -> (Rational, Vec<i32>, Option<LaurentPoly>) {
    assert!(!p.is_zero());
    let m = p.min_exponents();
    if let Some((e, c)) = p.as_monomial() {
        return (c.clone(), e.clone(), None);
    }
    let neg: Vec<i32> = m.iter().map(|x| -x).collect();
    let stripped = p.shift_exponents(&neg);
    let lc = stripped.leading_term().unwrap().1.clone();
    let atom = stripped.scale(&lc.recip());
    (lc, m, Some(atom))
}

fn merge_den(a: &[(Atom, u32)], b: &[(Atom, u32)], f: impl Fn(u32, u32) -> u32) -> Vec<(Atom, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = if i == a.len() {
            std::cmp::Ordering::Greater
        } else if j == b.len() {
            std::cmp::Ordering::Less
        } else {
            a[i].0.as_ref().cmp(b[j].0.as_ref())
        };
        match ord {
            std::cmp::Ordering::Less => {
                out.push((a[i].0.clone(), f(a[i].1, 0)));
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((b[j].0.clone(), f(0, b[j].1)));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0.clone(), f(a[i].1, b[j].1)));
                i += 1;
                j += 1;
            }
        }
    }
    out.retain(|(_, e)| *e > 0);
    out
}

impl RationalFunction {
    pub fn zero(reg: &Registry) -> Self {
        LaurentPoly::zero(reg).into()
    }

    pub fn one(reg: &Registry) -> Self {
        LaurentPoly::one(reg).into()
    }

    pub fn constant(reg: &Registry, c: Rational) -> Self {
        LaurentPoly::constant(reg, c).into()
    }

    pub fn integer(reg: &Registry, c: i64) -> Self {
        LaurentPoly::integer(reg, c).into()
    }

    pub fn var(reg: &Registry, name: &str) -> Result<Self> {
        Ok(LaurentPoly::var(reg, name)?.into())
    }

    pub fn var_pow(reg: &Registry, name: &str, k: i32) -> Result<Self> {
        Ok(LaurentPoly::var_pow(reg, name, k)?.into())
    }

    /// `num / den`, normalized.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero(format!("({num}) / 0")));
        }
        let (num, den) = LaurentPoly::align(&num, &den);
        Ok(Self::from(num).div_poly(&den))
    }

    pub fn registry(&self) -> &Registry {
        self.num.registry()
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    /// Denominator factors with multiplicities.
    pub fn denominator_factors(&self) -> impl Iterator<Item = (&LaurentPoly, u32)> {
        self.den.iter().map(|(a, e)| (a.as_ref(), *e))
    }

    /// The expanded denominator; its grlex-leading coefficient is `+1`.
    pub fn denominator(&self) -> LaurentPoly {
        let mut d = LaurentPoly::one(self.registry());
        for (a, e) in &self.den {
            d = &d * &a.pow(*e);
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.is_one()
    }

    /// The polynomial value, when the denominator is trivial.
    pub fn as_polynomial(&self) -> Option<&LaurentPoly> {
        self.den.is_empty().then_some(&self.num)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// True when neither numerator nor denominator mentions `var`.
    pub fn is_free_of(&self, var: &str) -> bool {
        !self.num.involves(var) && self.den.iter().all(|(a, _)| !a.involves(var))
    }

    pub fn to_registry(&self, reg: &Registry) -> Result<Self> {
        if self.registry().same(reg) {
            return Ok(self.clone());
        }
        let num = self.num.to_registry(reg)?;
        let mut out = RationalFunction::from(num);
        for (a, e) in &self.den {
            let a = a.to_registry(reg)?;
            // Re-normalize: the grlex leading term may differ after re-indexing.
            let (c, m, atom) = normalize_atom(&a);
            let neg: Vec<i32> = m.iter().map(|x| -x.saturating_mul(*e as i32)).collect();
            out.num = out.num.shift_exponents(&neg).scale(&crate::laurent::pow_rational(&c, -(*e as i32)));
            if let Some(atom) = atom {
                out.den = merge_den(&out.den, &[(Arc::new(atom), *e)], |x, y| x + y);
            }
        }
        Ok(out)
    }

    fn align(a: &Self, b: &Self) -> (Self, Self) {
        if a.registry().same(b.registry()) {
            return (a.clone(), b.clone());
        }
        let u = a.registry().union(b.registry());
        (a.to_registry(&u).unwrap(), b.to_registry(&u).unwrap())
    }

    /// Cancels atoms that divide the numerator.
    fn reduce(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        for (atom, e) in self.den.iter_mut() {
            while *e > 0 && crate::modp::may_divide(&self.num, atom) {
                match self.num.exact_div(atom) {
                    Some(q) => {
                        self.num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, e)| *e > 0);
        self
    }

    fn add_same(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            return RationalFunction {
                num: &self.num + &other.num,
                den: self.den.clone(),
            }
            .reduce();
        }
        let lcm = merge_den(&self.den, &other.den, u32::max);
        let lift = |x: &Self| {
            let missing = merge_den(&lcm, &x.den, |a, b| a - b);
            let mut n = x.num.clone();
            for (a, e) in &missing {
                n = &n * &a.pow(*e);
            }
            n
        };
        RationalFunction {
            num: &lift(self) + &lift(other),
            den: lcm,
        }
        .reduce()
    }

    fn mul_same(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.registry());
        }
        let out = RationalFunction {
            num: &self.num * &other.num,
            den: merge_den(&self.den, &other.den, |a, b| a + b),
        };
        if out.num.len() == 1 {
            // A monomial numerator cannot be divisible by any atom.
            return out;
        }
        out.reduce()
    }

    /// Division by a polynomial, recorded as a single new atom.
    fn div_poly(&self, d: &LaurentPoly) -> Self {
        let (c, m, atom) = normalize_atom(d);
        let neg: Vec<i32> = m.iter().map(|x| -x).collect();
        let num = self.num.shift_exponents(&neg).scale(&c.recip());
        let out = match atom {
            None => RationalFunction {
                num,
                den: self.den.clone(),
            },
            Some(atom) => RationalFunction {
                num,
                den: merge_den(&self.den, &[(Arc::new(atom), 1)], |a, b| a + b),
            },
        };
        out.reduce()
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(AlgebraError::DivisionByZero(format!("({self}) / 0")));
        }
        let (a, b) = Self::align(self, other);
        let mut out = a.div_poly(&b.num);
        // Multiply by b's denominator factors.
        for (atom, e) in &b.den {
            out.num = &out.num * &atom.pow(*e);
        }
        Ok(out.reduce())
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one(self.registry()).checked_div(self)
    }

    pub fn pow(&self, k: i32) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one(self.registry());
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.registry());
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Applies a monomial substitution. Fails if a denominator factor maps to zero.
    pub fn map_monomials(&self, map: &MonomialMap) -> Result<Self> {
        let mut out = RationalFunction::from(self.num.map_monomials(map));
        for (a, e) in &self.den {
            let img = a.map_monomials(map);
            if img.is_zero() {
                return Err(AlgebraError::DivisionByZero(format!(
                    "denominator factor {a} vanishes under substitution"
                )));
            }
            for _ in 0..*e {
                out = out.div_poly(&img);
            }
        }
        Ok(out)
    }

    /// Substitutes `var -> value` where `value` is a monomial.
    pub fn substitute(&self, var: &str, value: &LaurentPoly) -> Result<Self> {
        let reg = self.registry().union(value.registry());
        let me = self.to_registry(&reg)?;
        let mut map = MonomialMap::identity(&reg);
        map.set_poly(var, value)?;
        me.map_monomials(&map)
    }

    /// Numeric value at a point; `None` if a denominator factor vanishes there.
    pub fn eval_with<T, F>(&self, values: &[T], from_rational: F, is_zero: impl Fn(&T) -> bool) -> Option<T>
    where
        T: Clone + Add<Output = T> + Mul<Output = T> + Div<Output = T>,
        F: Fn(&Rational) -> T + Copy,
    {
        let n = self.num.eval_with(values, from_rational);
        let mut d = from_rational(&Rational::one());
        for (a, e) in &self.den {
            let v = a.eval_with(values, from_rational);
            if is_zero(&v) {
                return None;
            }
            for _ in 0..*e {
                d = d * v.clone();
            }
        }
        Some(n / d)
    }
}

impl From<LaurentPoly> for RationalFunction {
    fn from(p: LaurentPoly) -> Self {
        RationalFunction { num: p, den: Vec::new() }
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.registry().same(rhs.registry()) {
            self.add_same(rhs)
        } else {
            let (a, b) = RationalFunction::align(self, rhs);
            a.add_same(&b)
        }
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.registry().same(rhs.registry()) {
            self.mul_same(rhs)
        } else {
            let (a, b) = RationalFunction::align(self, rhs);
            a.mul_same(&b)
        }
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

forward_owned!(RationalFunction, Add, add);
forward_owned!(RationalFunction, Sub, sub);
forward_owned!(RationalFunction, Mul, mul);

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/(", self.num)?;
        for (k, (a, e)) in self.den.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "({a})")?;
            } else {
                write!(f, "({a})^{e}")?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_rational_function as p;

    fn reg() -> Registry {
        Registry::new(&["x", "y", "q", "t"])
    }

    #[test]
    fn sum_with_shared_poles_cancels() {
        let reg = reg();
        let a = p(&reg, "(t*x - y)/(x - y)").unwrap();
        let b = p(&reg, "(t*y - x)/(y - x)").unwrap();
        let s = &a + &b;
        assert_eq!(s.as_polynomial().unwrap(), &p(&reg, "1 + t").unwrap().numerator().clone());
    }

    #[test]
    fn denominator_is_normalized() {
        let reg = reg();
        let a = p(&reg, "1/(2*y*x - 4*x^2)").unwrap();
        let d = a.denominator();
        assert_eq!(d.leading_term().unwrap().1, &Rational::one());
        assert_eq!(d.min_exponents(), vec![0, 0, 0, 0]);
        assert_eq!(a, p(&reg, "-1/(4*x^2 - 2*x*y)").unwrap());
    }

    #[test]
    fn inverse_and_division() {
        let reg = reg();
        let a = p(&reg, "(1 - q*x)/(1 - x)").unwrap();
        let b = a.inv().unwrap();
        assert!((&a * &b).is_one());
        assert!(RationalFunction::zero(&reg).inv().is_err());
    }

    #[test]
    fn substitution_into_pole_fails() {
        let reg = reg();
        let a = p(&reg, "1/(1 - x*t)").unwrap();
        let one_over_t = LaurentPoly::var_pow(&reg, "t", -1).unwrap();
        assert!(a.substitute("x", &one_over_t).is_err());
        let b = a.substitute("x", &LaurentPoly::var(&reg, "q").unwrap()).unwrap();
        assert_eq!(b, p(&reg, "1/(1 - q*t)").unwrap());
    }

    #[test]
    fn shifted_factors_renormalize() {
        let reg = reg();
        let a = p(&reg, "1/(x - y)").unwrap();
        let mut m = MonomialMap::identity(&reg);
        m.multiply_image("x", "q", 1).unwrap();
        let s = a.map_monomials(&m).unwrap();
        assert_eq!(s, p(&reg, "1/(q*x - y)").unwrap());
    }
}
