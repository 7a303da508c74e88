//! Multiplicative shift operators `sum_n c_n(x) P^n` with
//! `P_i x_j = q^{delta_ij} x_j P_i`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{AlgebraError, Result};
use crate::laurent::{LaurentPoly, MonomialMap};
use crate::ratfunc::RationalFunction;
use crate::registry::Registry;
use crate::series::TruncatedSeries;

/// What a shift operator may carry as coefficients.
pub trait Coefficient: Clone + Send + Sync + fmt::Display {
    fn registry(&self) -> &Registry;
    fn to_registry(&self, reg: &Registry) -> Result<Self>;
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn map_monomials(&self, map: &MonomialMap) -> Result<Self>;

    /// Sum of a nonempty list.
    fn sum(items: Vec<Self>) -> Self {
        let mut it = items.into_iter();
        let first = it.next().expect("nonempty sum");
        it.fold(first, |acc, x| acc.plus(&x))
    }
}

impl Coefficient for RationalFunction {
    fn registry(&self) -> &Registry {
        RationalFunction::registry(self)
    }
    fn to_registry(&self, reg: &Registry) -> Result<Self> {
        RationalFunction::to_registry(self, reg)
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        RationalFunction::zero(self.registry())
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn map_monomials(&self, map: &MonomialMap) -> Result<Self> {
        RationalFunction::map_monomials(self, map)
    }
}

impl Coefficient for TruncatedSeries {
    fn registry(&self) -> &Registry {
        TruncatedSeries::registry(self)
    }
    fn to_registry(&self, reg: &Registry) -> Result<Self> {
        TruncatedSeries::to_registry(self, reg)
    }
    fn is_zero(&self) -> bool {
        TruncatedSeries::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        TruncatedSeries::zero_like(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn map_monomials(&self, map: &MonomialMap) -> Result<Self> {
        TruncatedSeries::map_monomials(self, map)
    }
}

/// The substitution `x_i -> q^{n_i} x_i` over `reg`. Returns the registry it
/// actually acts on (extended by `q` when needed).
pub fn shift_map(reg: &Registry, coords: &[String], q: &str, n: &[i32]) -> Result<MonomialMap> {
    let mut m = MonomialMap::identity(reg);
    for (c, &k) in coords.iter().zip(n) {
        if k != 0 && reg.index(c).is_some() {
            m.multiply_image(c, q, k)?;
        }
    }
    Ok(m)
}

/// Shifts `f` by `x_i -> q^{n_i} x_i`.
pub fn shifted<C: Coefficient>(f: &C, coords: &[String], q: &str, n: &[i32]) -> Result<C> {
    if n.iter().all(|&k| k == 0) {
        return Ok(f.clone());
    }
    let touches = coords
        .iter()
        .zip(n)
        .any(|(c, &k)| k != 0 && f.registry().index(c).is_some());
    if !touches {
        return Ok(f.clone());
    }
    let f = if f.registry().index(q).is_some() {
        f.clone()
    } else {
        f.to_registry(&f.registry().union(&Registry::new(&[q])))?
    };
    let m = shift_map(f.registry(), coords, q, n)?;
    f.map_monomials(&m)
}

#[derive(Clone)]
pub struct ShiftOperator<C> {
    coords: Arc<[String]>,
    q: Arc<str>,
    terms: BTreeMap<Vec<i32>, C>,
}

impl<C: Coefficient> ShiftOperator<C> {
    pub fn zero<S: AsRef<str>>(coords: &[S], q: &str) -> Self {
        let coords: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
        ShiftOperator {
            coords: coords.into(),
            q: q.into(),
            terms: BTreeMap::new(),
        }
    }

    /// A zero operator on the same coordinates.
    pub fn zero_like(&self) -> Self {
        ShiftOperator {
            coords: self.coords.clone(),
            q: self.q.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// `c * P^n`.
    pub fn term<S: AsRef<str>>(coords: &[S], q: &str, n: Vec<i32>, c: C) -> Self {
        let mut op = Self::zero(coords, q);
        op.add_term(n, c);
        op
    }

    /// `c * P^n` on the same coordinates as `self`.
    pub fn term_like(&self, n: Vec<i32>, c: C) -> Self {
        let mut op = self.zero_like();
        op.add_term(n, c);
        op
    }

    pub fn add_term(&mut self, n: Vec<i32>, c: C) {
        assert_eq!(n.len(), self.coords.len(), "shift vector length");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&n) {
            Some(old) => {
                let s = old.plus(&c);
                if s.is_zero() {
                    self.terms.remove(&n);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(n, c);
            }
        }
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn shift_base(&self) -> &str {
        &self.q
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, n: &[i32]) -> Option<&C> {
        self.terms.get(n)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.coords != other.coords || self.q != other.q {
            return Err(AlgebraError::MismatchedCoordinates(format!(
                "{:?}/{} vs {:?}/{}",
                self.coords, self.q, other.coords, other.q
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (n, c) in &other.terms {
            out.add_term(n.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.negate())
    }

    pub fn negate(&self) -> Self {
        self.map_coefficients(|c| Ok(c.negate())).unwrap()
    }

    /// Left multiplication by a function: `c * A`.
    pub fn left_mul(&self, c: &C) -> Self {
        self.map_coefficients(|x| Ok(c.times(x))).unwrap()
    }

    /// Applies a map to each coefficient, dropping zeros.
    pub fn map_coefficients(&self, f: impl Fn(&C) -> Result<C>) -> Result<Self> {
        let mut out = self.zero_like();
        for (n, c) in &self.terms {
            out.add_term(n.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Shifts a function by `P^n`.
    pub fn shift_fn(&self, f: &C, n: &[i32]) -> Result<C> {
        shifted(f, &self.coords, &self.q, n)
    }

    /// Products `A_m(x) B_n(q^m x)` grouped by `m + n`, negated when `sign` is false.
    fn products(&self, other: &Self, sign: bool, buckets: &mut BTreeMap<Vec<i32>, Vec<C>>) -> Result<()> {
        let a: Vec<(&Vec<i32>, &C)> = self.terms.iter().collect();
        let partials: Vec<Result<Vec<(Vec<i32>, C)>>> = a
            .par_iter()
            .map(|(m, am)| {
                let am = if sign { (*am).clone() } else { am.negate() };
                let mut out = Vec::with_capacity(other.terms.len());
                for (n, bn) in &other.terms {
                    let sb = self.shift_fn(bn, m)?;
                    let k: Vec<i32> = m.iter().zip(n).map(|(x, y)| x + y).collect();
                    out.push((k, am.times(&sb)));
                }
                Ok(out)
            })
            .collect();
        for p in partials {
            for (k, c) in p? {
                buckets.entry(k).or_default().push(c);
            }
        }
        Ok(())
    }

    fn collect(&self, buckets: BTreeMap<Vec<i32>, Vec<C>>) -> Self {
        let sums: Vec<(Vec<i32>, C)> = buckets.into_par_iter().map(|(k, cs)| (k, C::sum(cs))).collect();
        let mut out = self.zero_like();
        for (k, c) in sums {
            out.add_term(k, c);
        }
        out
    }

    /// `(A B)_k = sum_{m+n=k} A_m(x) B_n(q^m x)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut buckets = BTreeMap::new();
        self.products(other, true, &mut buckets)?;
        Ok(self.collect(buckets))
    }

    /// `AB - BA`, summing both products per shift before simplifying.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut buckets = BTreeMap::new();
        self.products(other, true, &mut buckets)?;
        other.products(self, false, &mut buckets)?;
        Ok(self.collect(buckets))
    }

    /// `(A f)(x) = sum_n A_n(x) f(q^n x)`.
    pub fn apply(&self, f: &C) -> Result<C> {
        let parts: Vec<Result<C>> = self
            .terms
            .par_iter()
            .map(|(n, c)| Ok(c.times(&self.shift_fn(f, n)?)))
            .collect();
        let mut acc = f.zero_like();
        for p in parts {
            acc = acc.plus(&p?);
        }
        Ok(acc)
    }
}

impl ShiftOperator<RationalFunction> {
    pub fn apply_poly(&self, f: &LaurentPoly) -> Result<RationalFunction> {
        self.apply(&RationalFunction::from(f.clone()))
    }

    /// Acts coefficient-wise on a series whose small variables are not shifted.
    pub fn apply_series(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        let mut acc = f.zero_like();
        for (n, c) in &self.terms {
            let s = shifted(f, &self.coords, &self.q, n)?;
            acc = acc.try_add(&s.scale(c))?;
        }
        Ok(acc)
    }

    /// Promotes the coefficients to constant series.
    pub fn to_series<S: AsRef<str>>(&self, small: &[S], caps: &[u32]) -> ShiftOperator<TruncatedSeries> {
        let mut out = ShiftOperator {
            coords: self.coords.clone(),
            q: self.q.clone(),
            terms: BTreeMap::new(),
        };
        for (n, c) in &self.terms {
            out.add_term(n.clone(), TruncatedSeries::constant(small, caps, c.clone()));
        }
        out
    }
}

impl ShiftOperator<TruncatedSeries> {
    /// Truncates every coefficient to the given caps.
    pub fn truncate(&self, caps: &[u32]) -> Self {
        self.map_coefficients(|c| Ok(c.truncate(caps))).unwrap()
    }

    /// The operator formed by the degree-`deg` coefficients.
    pub fn degree_part(&self, deg: &[u32]) -> ShiftOperator<RationalFunction> {
        let mut out = ShiftOperator {
            coords: self.coords.clone(),
            q: self.q.clone(),
            terms: BTreeMap::new(),
        };
        for (n, c) in &self.terms {
            out.add_term(n.clone(), c.coeff(deg));
        }
        out
    }

    /// Every small-variable degree carried by some coefficient.
    pub fn degrees(&self) -> Vec<Vec<u32>> {
        let mut ds: Vec<Vec<u32>> = self
            .terms
            .values()
            .flat_map(|c| c.terms().map(|(d, _)| d.clone()).collect::<Vec<_>>())
            .collect();
        ds.sort();
        ds.dedup();
        ds
    }
}

impl<C: Coefficient> PartialEq for ShiftOperator<C> {
    fn eq(&self, other: &Self) -> bool {
        match self.try_sub(other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }
}

impl<C: Coefficient> fmt::Display for ShiftOperator<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (n, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}]")?;
            for (i, &e) in n.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*P_{}", self.coords[i])?,
                    _ => write!(f, "*P_{}^{}", self.coords[i], e)?,
                }
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for ShiftOperator<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ShiftOperator({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_rational_function as parse;

    fn setup() -> (Registry, Vec<String>) {
        (Registry::new(&["x1", "x2", "q"]), vec!["x1".into(), "x2".into()])
    }

    fn p(coords: &[String], reg: &Registry, i: usize) -> ShiftOperator<RationalFunction> {
        let mut n = vec![0; coords.len()];
        n[i] = 1;
        ShiftOperator::term(coords, "q", n, RationalFunction::one(reg))
    }

    fn mult(coords: &[String], reg: &Registry, s: &str) -> ShiftOperator<RationalFunction> {
        ShiftOperator::term(coords, "q", vec![0; coords.len()], parse(reg, s).unwrap())
    }

    #[test]
    fn quantum_torus_relation() {
        let (reg, c) = setup();
        let lhs = p(&c, &reg, 0).compose(&mult(&c, &reg, "x1")).unwrap();
        let rhs = mult(&c, &reg, "q*x1").compose(&p(&c, &reg, 0)).unwrap();
        assert_eq!(lhs, rhs);
        let lhs = p(&c, &reg, 0).compose(&mult(&c, &reg, "x2")).unwrap();
        assert_eq!(lhs, mult(&c, &reg, "x2").compose(&p(&c, &reg, 0)).unwrap());
    }

    #[test]
    fn commutator_of_shift_and_coordinate() {
        let (reg, c) = setup();
        let com = p(&c, &reg, 0).commutator(&mult(&c, &reg, "x1")).unwrap();
        let expect = mult(&c, &reg, "(q - 1)*x1").compose(&p(&c, &reg, 0)).unwrap();
        assert_eq!(com, expect);
        assert!(p(&c, &reg, 0).commutator(&p(&c, &reg, 1)).unwrap().is_zero());
    }

    #[test]
    fn apply_shifts_monomials() {
        let (reg, c) = setup();
        let f = parse(&reg, "x1^3").unwrap();
        assert_eq!(p(&c, &reg, 0).apply(&f).unwrap(), parse(&reg, "q^3*x1^3").unwrap());
        let sum = p(&c, &reg, 0).try_add(&p(&c, &reg, 1)).unwrap();
        let g = parse(&reg, "x1*x2").unwrap();
        assert_eq!(sum.apply(&g).unwrap(), parse(&reg, "2*q*x1*x2").unwrap());
    }

    #[test]
    fn mismatched_coordinates_are_rejected() {
        let (reg, c) = setup();
        let other = ShiftOperator::term(&["y"], "q", vec![1], RationalFunction::one(&reg));
        assert!(matches!(
            p(&c, &reg, 0).compose(&other),
            Err(AlgebraError::MismatchedCoordinates(_))
        ));
    }
}
