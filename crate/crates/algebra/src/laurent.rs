//! Sparse multivariate Laurent polynomials over the rationals.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{AlgebraError, Result};
use crate::registry::Registry;
use crate::Rational;

pub type Exponent = Vec<i32>;

/// Graded-lexicographic comparison: total degree first, then lexicographic.
pub fn grlex_cmp(a: &[i32], b: &[i32]) -> Ordering {
    let da: i64 = a.iter().map(|&e| e as i64).sum();
    let db: i64 = b.iter().map(|&e| e as i64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

#[derive(Clone)]
pub struct LaurentPoly {
    reg: Registry,
    terms: BTreeMap<Exponent, Rational>,
}

impl LaurentPoly {
    pub fn zero(reg: &Registry) -> Self {
        LaurentPoly {
            reg: reg.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(reg: &Registry) -> Self {
        Self::constant(reg, Rational::one())
    }

    pub fn constant(reg: &Registry, c: Rational) -> Self {
        Self::monomial(reg, vec![0; reg.len()], c)
    }

    pub fn integer(reg: &Registry, c: i64) -> Self {
        Self::constant(reg, Rational::from_integer(BigInt::from(c)))
    }

    pub fn monomial(reg: &Registry, exp: Exponent, c: Rational) -> Self {
        assert_eq!(exp.len(), reg.len(), "exponent length must match registry");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        LaurentPoly {
            reg: reg.clone(),
            terms,
        }
    }

    pub fn var(reg: &Registry, name: &str) -> Result<Self> {
        Self::var_pow(reg, name, 1)
    }

    pub fn var_pow(reg: &Registry, name: &str, k: i32) -> Result<Self> {
        let i = reg.require(name)?;
        let mut e = vec![0; reg.len()];
        e[i] = k;
        Ok(Self::monomial(reg, e, Rational::one()))
    }

    /// Builds from (exponent, coefficient) pairs, combining repeats and dropping zeros.
    pub fn from_terms<I>(reg: &Registry, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let mut p = Self::zero(reg);
        for (e, c) in terms {
            assert_eq!(e.len(), reg.len(), "exponent length must match registry");
            p.add_term(e, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn registry(&self) -> &Registry {
        &self.reg
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[i32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant value, if this polynomial has no non-trivial monomial.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_monomial(&self) -> Option<(&Exponent, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Re-expresses the polynomial over a registry containing all of its variables.
    pub fn to_registry(&self, reg: &Registry) -> Result<Self> {
        if self.reg.same(reg) {
            return Ok(self.clone());
        }
        let emb = reg.embedding(&self.reg)?;
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut ne = vec![0; reg.len()];
                for (k, &x) in e.iter().enumerate() {
                    ne[emb[k]] = x;
                }
                (ne, c.clone())
            })
            .collect();
        Ok(LaurentPoly {
            reg: reg.clone(),
            terms,
        })
    }

    /// Both operands over the union registry.
    pub fn align(a: &Self, b: &Self) -> (Self, Self) {
        if a.reg.same(&b.reg) {
            return (a.clone(), b.clone());
        }
        let u = a.reg.union(&b.reg);
        (a.to_registry(&u).unwrap(), b.to_registry(&u).unwrap())
    }

    fn aligned_op(&self, other: &Self, f: impl Fn(&Self, &Self) -> Self) -> Self {
        if self.reg.same(&other.reg) {
            f(self, other)
        } else {
            let (a, b) = Self::align(self, other);
            f(&a, &b)
        }
    }

    fn add_same(&self, other: &Self) -> Self {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (e, c) in &small.terms {
            big.add_term(e.clone(), c.clone());
        }
        big
    }

    fn mul_same(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.reg);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        let n = self.reg.len();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = Vec::with_capacity(n);
                e.extend(ea.iter().zip(eb).map(|(x, y)| x + y));
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.reg);
        }
        LaurentPoly {
            reg: self.reg.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    /// Multiplies by the monomial `x^e`.
    pub fn shift_exponents(&self, e: &[i32]) -> Self {
        LaurentPoly {
            reg: self.reg.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.reg);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_same(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_same(&base);
            }
        }
        acc
    }

    /// Leading term under graded-lexicographic order.
    pub fn leading_term(&self) -> Option<(&Exponent, &Rational)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| grlex_cmp(a, b))
    }

    /// Component-wise minimum exponent (the monomial content).
    pub fn min_exponents(&self) -> Exponent {
        let mut m: Option<Exponent> = None;
        for e in self.terms.keys() {
            match &mut m {
                None => m = Some(e.clone()),
                Some(m) => {
                    for (a, b) in m.iter_mut().zip(e) {
                        *a = (*a).min(*b);
                    }
                }
            }
        }
        m.unwrap_or_else(|| vec![0; self.reg.len()])
    }

    pub fn max_exponents(&self) -> Exponent {
        let mut m: Option<Exponent> = None;
        for e in self.terms.keys() {
            match &mut m {
                None => m = Some(e.clone()),
                Some(m) => {
                    for (a, b) in m.iter_mut().zip(e) {
                        *a = (*a).max(*b);
                    }
                }
            }
        }
        m.unwrap_or_else(|| vec![0; self.reg.len()])
    }

    pub fn involves(&self, var: &str) -> bool {
        match self.reg.index(var) {
            Some(i) => self.terms.keys().any(|e| e[i] != 0),
            None => false,
        }
    }

    /// Applies a monomial substitution `x_v -> c_v x^{m_v}` to every term.
    pub fn map_monomials(&self, map: &MonomialMap) -> Self {
        debug_assert!(map.source.same(&self.reg));
        let mut out = Self::zero(&map.target);
        for (e, c) in &self.terms {
            let (ne, nc) = map.image(e, c);
            out.add_term(ne, nc);
        }
        out
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if !self.reg.same(&d.reg) {
            let (a, b) = Self::align(self, d);
            return a.exact_div(&b);
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        if let Some((de, dc)) = d.as_monomial() {
            let neg: Vec<i32> = de.iter().map(|x| -x).collect();
            return Some(self.shift_exponents(&neg).scale(&dc.recip()));
        }
        let mf = self.min_exponents();
        let md = d.min_exponents();
        let neg_mf: Vec<i32> = mf.iter().map(|x| -x).collect();
        let neg_md: Vec<i32> = md.iter().map(|x| -x).collect();
        let mut rem = self.shift_exponents(&neg_mf);
        let div = d.shift_exponents(&neg_md);
        // Lex order (the map order) makes the leading term the last key.
        let (lde, ldc) = {
            let (e, c) = div.terms.last_key_value().unwrap();
            (e.clone(), c.clone())
        };
        // Every exponent of the quotient is bounded by deg(self) - deg(d) per variable.
        let bound: Vec<i32> = rem
            .max_exponents()
            .iter()
            .zip(div.max_exponents())
            .map(|(a, b)| a - b)
            .collect();
        if bound.iter().any(|&b| b < 0) {
            return None;
        }
        let mut quot = Self::zero(&self.reg);
        while let Some((le, lc)) = rem.terms.last_key_value() {
            let qe: Vec<i32> = le.iter().zip(&lde).map(|(a, b)| a - b).collect();
            if qe.iter().zip(&bound).any(|(&x, &b)| x < 0 || x > b) {
                return None;
            }
            let qc = lc / &ldc;
            for (e, c) in &div.terms {
                let ne: Vec<i32> = e.iter().zip(&qe).map(|(a, b)| a + b).collect();
                rem.add_term(ne, -(c * &qc));
            }
            quot.add_term(qe, qc);
        }
        let shift: Vec<i32> = mf.iter().zip(&md).map(|(a, b)| a - b).collect();
        Some(quot.shift_exponents(&shift))
    }

    /// Value of the polynomial at a point, in any field containing the rationals.
    pub fn eval_with<T, F>(&self, values: &[T], from_rational: F) -> T
    where
        T: Clone + Add<Output = T> + Mul<Output = T> + std::ops::Div<Output = T>,
        F: Fn(&Rational) -> T,
    {
        assert_eq!(values.len(), self.reg.len());
        let zero = from_rational(&Rational::zero());
        let one = from_rational(&Rational::one());
        let mut acc = zero;
        for (e, c) in &self.terms {
            let mut t = from_rational(c);
            for (k, &x) in e.iter().enumerate() {
                if x > 0 {
                    for _ in 0..x {
                        t = t * values[k].clone();
                    }
                } else if x < 0 {
                    let mut p = one.clone();
                    for _ in 0..(-x) {
                        p = p * values[k].clone();
                    }
                    t = t / p;
                }
            }
            acc = acc + t;
        }
        acc
    }
}

/// A substitution sending each variable of `source` to a coefficient times a
/// monomial over `target`.
#[derive(Clone, Debug)]
pub struct MonomialMap {
    source: Registry,
    target: Registry,
    images: Vec<(Rational, Exponent)>,
}

impl MonomialMap {
    pub fn identity(reg: &Registry) -> Self {
        let n = reg.len();
        let images = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                (Rational::one(), e)
            })
            .collect();
        MonomialMap {
            source: reg.clone(),
            target: reg.clone(),
            images,
        }
    }

    pub fn source(&self) -> &Registry {
        &self.source
    }

    pub fn target(&self) -> &Registry {
        &self.target
    }

    /// Sends `var` to `coeff * x^exp` (exponent over the target registry).
    pub fn set(&mut self, var: &str, coeff: Rational, exp: Exponent) -> Result<()> {
        let i = self.source.require(var)?;
        assert_eq!(exp.len(), self.target.len());
        self.images[i] = (coeff, exp);
        Ok(())
    }

    /// Sends `var` to the given monomial polynomial.
    pub fn set_poly(&mut self, var: &str, image: &LaurentPoly) -> Result<()> {
        let img = image.to_registry(&self.target)?;
        let (e, c) = img
            .as_monomial()
            .ok_or_else(|| AlgebraError::NotMonomial(format!("{img}")))?;
        self.set(var, c.clone(), e.clone())
    }

    /// Multiplies the image of `var` by `mult^k` where `mult` is another variable.
    pub fn multiply_image(&mut self, var: &str, mult: &str, k: i32) -> Result<()> {
        let i = self.source.require(var)?;
        let j = self.target.require(mult)?;
        self.images[i].1[j] += k;
        Ok(())
    }

    fn image(&self, e: &[i32], c: &Rational) -> (Exponent, Rational) {
        let mut ne = vec![0; self.target.len()];
        let mut nc = c.clone();
        for (v, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let (ic, ie) = &self.images[v];
            for (a, b) in ne.iter_mut().zip(ie) {
                *a += k * b;
            }
            if !ic.is_one() {
                nc *= pow_rational(ic, k);
            }
        }
        (ne, nc)
    }
}

pub(crate) fn pow_rational(c: &Rational, k: i32) -> Rational {
    let base = if k < 0 { c.recip() } else { c.clone() };
    num_traits::pow(base, k.unsigned_abs() as usize)
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.reg.same(&other.reg) {
            self.terms == other.terms
        } else {
            let (a, b) = Self::align(self, other);
            a.terms == b.terms
        }
    }
}

impl Eq for LaurentPoly {}

impl PartialOrd for LaurentPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Structural order (only meaningful within one registry); used to key
/// denominator factors.
impl Ord for LaurentPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.terms.cmp(&other.terms)
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.aligned_op(rhs, LaurentPoly::add_same)
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.aligned_op(rhs, |a, b| a.add_same(&-b))
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.aligned_op(rhs, LaurentPoly::mul_same)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            reg: self.reg.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($t:ty, $tr:ident, $m:ident) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $m(self, rhs: &'a $t) -> $t {
                (&self).$m(rhs)
            }
        }
    };
}
pub(crate) use forward_owned;

forward_owned!(LaurentPoly, Add, add);
forward_owned!(LaurentPoly, Sub, sub);
forward_owned!(LaurentPoly, Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest terms first so the output reads like a textbook polynomial.
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| grlex_cmp(b.0, a.0));
        for (k, (e, c)) in ts.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (v, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(self.reg.names()[v].clone()),
                    _ => factors.push(format!("{}^{}", self.reg.names()[v], x)),
                }
            }
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", a, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}
