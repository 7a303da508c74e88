//! Truncated power series in a few small variables with rational-function
//! coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{AlgebraError, Result};
use crate::laurent::{forward_owned, MonomialMap};
use crate::ratfunc::RationalFunction;
use crate::registry::Registry;

#[derive(Clone)]
pub struct TruncatedSeries {
    small: Arc<[String]>,
    caps: Vec<u32>,
    reg: Registry,
    terms: BTreeMap<Vec<u32>, RationalFunction>,
}

impl TruncatedSeries {
    /// The zero series. `reg` is the coefficient registry and must not contain
    /// the small variables.
    pub fn zero<S: AsRef<str>>(small: &[S], caps: &[u32], reg: &Registry) -> Self {
        assert_eq!(small.len(), caps.len(), "one cap per small variable");
        let small: Vec<String> = small.iter().map(|s| s.as_ref().to_string()).collect();
        TruncatedSeries {
            small: small.into(),
            caps: caps.to_vec(),
            reg: reg.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant<S: AsRef<str>>(small: &[S], caps: &[u32], c: RationalFunction) -> Self {
        let mut s = Self::zero(small, caps, c.registry());
        let deg = vec![0; caps.len()];
        s.insert(deg, c);
        s
    }

    pub fn one<S: AsRef<str>>(small: &[S], caps: &[u32], reg: &Registry) -> Self {
        Self::constant(small, caps, RationalFunction::one(reg))
    }

    /// A zero series with the same variables, caps and registry as `self`.
    pub fn zero_like(&self) -> Self {
        TruncatedSeries {
            small: self.small.clone(),
            caps: self.caps.clone(),
            reg: self.reg.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant_like(&self, c: RationalFunction) -> Self {
        let mut s = self.zero_like();
        s.insert(vec![0; self.caps.len()], c);
        s
    }

    /// `c * s^deg`; dropped if beyond the caps.
    pub fn monomial_like(&self, deg: Vec<u32>, c: RationalFunction) -> Self {
        let mut s = self.zero_like();
        s.insert(deg, c);
        s
    }

    /// Adds `c` to the coefficient of `deg`, ignoring degrees beyond the caps.
    pub fn insert(&mut self, deg: Vec<u32>, c: RationalFunction) {
        assert_eq!(deg.len(), self.caps.len());
        if deg.iter().zip(&self.caps).any(|(d, m)| d > m) || c.is_zero() {
            return;
        }
        let c = if c.registry().same(&self.reg) {
            c
        } else {
            let u = self.reg.union(c.registry());
            if !u.same(&self.reg) {
                self.rebase(&u);
            }
            c.to_registry(&self.reg).expect("registry union contains all variables")
        };
        match self.terms.get_mut(&deg) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&deg);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(deg, c);
            }
        }
    }

    fn rebase(&mut self, reg: &Registry) {
        for c in self.terms.values_mut() {
            *c = c.to_registry(reg).expect("registry union contains all variables");
        }
        self.reg = reg.clone();
    }

    pub fn small_vars(&self) -> &[String] {
        &self.small
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn registry(&self) -> &Registry {
        &self.reg
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, deg: &[u32]) -> RationalFunction {
        self.terms
            .get(deg)
            .cloned()
            .unwrap_or_else(|| RationalFunction::zero(&self.reg))
    }

    pub fn constant_term(&self) -> RationalFunction {
        self.coeff(&vec![0; self.caps.len()])
    }

    /// The coefficient as a plain rational function when nothing but the
    /// constant term survives.
    pub fn as_constant(&self) -> Option<RationalFunction> {
        match self.terms.len() {
            0 => Some(RationalFunction::zero(&self.reg)),
            1 => self.terms.get(&vec![0; self.caps.len()]).cloned(),
            _ => None,
        }
    }

    /// Lowest nonzero degree in grlex order, if any.
    pub fn lowest_degree(&self) -> Option<Vec<u32>> {
        self.terms
            .keys()
            .min_by(|a, b| {
                let sa: u32 = a.iter().sum();
                let sb: u32 = b.iter().sum();
                sa.cmp(&sb).then_with(|| a.cmp(b))
            })
            .cloned()
    }

    /// Drops every term beyond the new caps (taken component-wise with the old).
    pub fn truncate(&self, caps: &[u32]) -> Self {
        assert_eq!(caps.len(), self.caps.len());
        let caps: Vec<u32> = caps.iter().zip(&self.caps).map(|(a, b)| *a.min(b)).collect();
        TruncatedSeries {
            small: self.small.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(d, _)| d.iter().zip(&caps).all(|(x, m)| x <= m))
                .map(|(d, c)| (d.clone(), c.clone()))
                .collect(),
            caps,
            reg: self.reg.clone(),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.small != other.small {
            return Err(AlgebraError::SeriesMismatch(self.small.to_vec(), other.small.to_vec()));
        }
        Ok(())
    }

    fn min_caps(&self, other: &Self) -> Vec<u32> {
        self.caps.iter().zip(&other.caps).map(|(a, b)| *a.min(b)).collect()
    }

    fn empty_with(&self, other: &Self) -> Self {
        let mut out = self.zero_like();
        out.caps = self.min_caps(other);
        out.reg = self.reg.union(&other.reg);
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.empty_with(other);
        for (d, c) in self.terms.iter().chain(other.terms.iter()) {
            out.insert(d.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.empty_with(other);
        let caps = out.caps.clone();
        for (da, ca) in &self.terms {
            if da.iter().zip(&caps).any(|(x, m)| x > m) {
                continue;
            }
            for (db, cb) in &other.terms {
                let d: Vec<u32> = da.iter().zip(db).map(|(x, y)| x + y).collect();
                if d.iter().zip(&caps).any(|(x, m)| x > m) {
                    continue;
                }
                out.insert(d, ca * cb);
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient by a rational function.
    pub fn scale(&self, c: &RationalFunction) -> Self {
        let mut out = self.zero_like();
        for (d, x) in &self.terms {
            out.insert(d.clone(), x * c);
        }
        out
    }

    /// Multiplies by `s^deg`, dropping what leaves the caps.
    pub fn shift_degree(&self, deg: &[u32]) -> Self {
        let mut out = self.zero_like();
        for (d, x) in &self.terms {
            let nd: Vec<u32> = d.iter().zip(deg).map(|(a, b)| a + b).collect();
            out.insert(nd, x.clone());
        }
        out
    }

    /// Multiplicative inverse up to the caps (Neumann series around the
    /// degree-zero coefficient).
    pub fn invert(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(AlgebraError::NotInvertible);
        }
        let c0inv = c0.inv()?;
        // e = -(s - c0) / c0, so s^{-1} = c0^{-1} * sum_k e^k.
        let mut e = self.zero_like();
        for (d, c) in &self.terms {
            if d.iter().any(|&x| x > 0) {
                e.insert(d.clone(), -(c * &c0inv));
            }
        }
        let max_order: u32 = self.caps.iter().sum();
        let mut acc = self.constant_like(RationalFunction::one(&self.reg));
        let mut pow = acc.clone();
        for _ in 0..max_order {
            pow = pow.try_mul(&e)?;
            if pow.is_zero() {
                break;
            }
            acc = acc.try_add(&pow)?;
        }
        Ok(acc.scale(&c0inv))
    }

    /// Applies a fallible map to each coefficient.
    pub fn try_map(&self, f: impl Fn(&RationalFunction) -> Result<RationalFunction>) -> Result<Self> {
        let mut out = self.zero_like();
        for (d, c) in &self.terms {
            out.insert(d.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn map_monomials(&self, map: &MonomialMap) -> Result<Self> {
        let mut out = self.zero_like();
        out.reg = map.target().clone();
        for (d, c) in &self.terms {
            let c = if c.registry().same(map.source()) {
                c.map_monomials(map)?
            } else {
                c.to_registry(map.source())?.map_monomials(map)?
            };
            out.insert(d.clone(), c);
        }
        Ok(out)
    }

    /// Re-expresses the series over a larger list of small variables; the new
    /// ones enter with degree zero.
    pub fn embed<S: AsRef<str>>(&self, small: &[S], caps: &[u32]) -> Result<Self> {
        let pos: Vec<usize> = self
            .small
            .iter()
            .map(|v| {
                small
                    .iter()
                    .position(|s| s.as_ref() == v)
                    .ok_or_else(|| AlgebraError::UnknownVariable(v.clone()))
            })
            .collect::<Result<_>>()?;
        let mut out = TruncatedSeries::zero(small, caps, &self.reg);
        for (d, c) in &self.terms {
            let mut nd = vec![0; caps.len()];
            for (k, &e) in d.iter().enumerate() {
                nd[pos[k]] = e;
            }
            out.insert(nd, c.clone());
        }
        Ok(out)
    }

    pub fn to_registry(&self, reg: &Registry) -> Result<Self> {
        let mut out = self.zero_like();
        out.reg = reg.clone();
        for (d, c) in &self.terms {
            out.insert(d.clone(), c.to_registry(reg)?);
        }
        Ok(out)
    }
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        match self.try_add(&-other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }
}

impl<'a> Add<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.try_add(rhs).expect("series over the same small variables")
    }
}

impl<'a> Sub<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.try_add(&-rhs).expect("series over the same small variables")
    }
}

impl<'a> Mul<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.try_mul(rhs).expect("series over the same small variables")
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            small: self.small.clone(),
            caps: self.caps.clone(),
            reg: self.reg.clone(),
            terms: self.terms.iter().map(|(d, c)| (d.clone(), -c)).collect(),
        }
    }
}

impl Neg for TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        -&self
    }
}

forward_owned!(TruncatedSeries, Add, add);
forward_owned!(TruncatedSeries, Sub, sub);
forward_owned!(TruncatedSeries, Mul, mul);

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (d, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}]")?;
            for (v, &e) in d.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*{}", self.small[v])?,
                    _ => write!(f, "*{}^{}", self.small[v], e)?,
                }
            }
        }
        let caps: Vec<String> = self
            .small
            .iter()
            .zip(&self.caps)
            .map(|(s, c)| format!("{s}^{}", c + 1))
            .collect();
        write!(f, " + O({})", caps.join(", "))
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_rational_function as p;

    #[test]
    fn geometric_series() {
        let reg = Registry::new(&["x"]);
        let one = TruncatedSeries::one(&["w"], &[2], &reg);
        let w = one.monomial_like(vec![1], RationalFunction::one(&reg));
        let inv = (&one - &w).invert().unwrap();
        let expect = &(&one + &w) + &one.monomial_like(vec![2], RationalFunction::one(&reg));
        assert_eq!(inv, expect);
    }

    #[test]
    fn one_step_neumann() {
        let reg = Registry::new(&["x"]);
        let c = p(&reg, "1 - x").unwrap();
        let d = p(&reg, "x^2 + 3").unwrap();
        let s = &TruncatedSeries::constant(&["w"], &[1], c.clone())
            + &TruncatedSeries::zero(&["w"], &[1], &reg).monomial_like(vec![1], d.clone());
        let inv = s.invert().unwrap();
        assert_eq!(inv.coeff(&[0]), c.inv().unwrap());
        assert_eq!(inv.coeff(&[1]), -(&d * &c.pow(-2).unwrap()));
    }

    #[test]
    fn zero_constant_term_is_not_invertible() {
        let reg = Registry::new(&["x"]);
        let s = TruncatedSeries::zero(&["w"], &[3], &reg).monomial_like(vec![1], RationalFunction::one(&reg));
        assert_eq!(s.invert().unwrap_err(), AlgebraError::NotInvertible);
    }

    #[test]
    fn caps_take_the_minimum() {
        let reg = Registry::new(&["x"]);
        let a = TruncatedSeries::one(&["p", "w"], &[3, 1], &reg);
        let b = TruncatedSeries::one(&["p", "w"], &[1, 2], &reg);
        assert_eq!((&a * &b).caps(), &[1, 1]);
        let c = TruncatedSeries::one(&["z"], &[1], &reg);
        assert!(a.try_mul(&c).is_err());
    }
}
