//! Univariate polynomials over a field, small determinants, and polynomial roots.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use qoper_algebra::{LaurentPoly, Rational, RationalFunction};

pub type C64 = Complex64;

/// Scalars the q-oper pipeline runs over: exact rationals or complex doubles.
pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Ring
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    /// `None` on division by (exact) zero.
    fn checked_div(&self, other: &Self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    /// Size used for relative residuals.
    fn magnitude(&self) -> f64;
    fn to_c64(&self) -> C64;
    /// Exact fields compare with zero exactly; floating ones use tolerances.
    fn is_exact() -> bool;

    fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Field for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        C64::new(n as f64, 0.0)
    }
    fn checked_div(&self, other: &Self) -> Option<Self> {
        if other.norm() == 0.0 {
            None
        } else {
            Some(self / other)
        }
    }
    fn is_zero(&self) -> bool {
        self.norm() == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(n.into())
    }
    fn checked_div(&self, other: &Self) -> Option<Self> {
        if Zero::is_zero(other) {
            None
        } else {
            Some(self / other)
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_c64(&self) -> C64 {
        C64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn is_exact() -> bool {
        true
    }
}

/// Dense univariate polynomial, lowest degree first, no trailing exact zeros.
#[derive(Clone, PartialEq)]
pub struct UPoly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> UPoly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: vec![] }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    /// `z - r`.
    pub fn linear_root(r: F) -> Self {
        Self::new(vec![-r, F::one()])
    }

    /// `prod (z - r_i)`.
    pub fn from_roots(roots: &[F]) -> Self {
        roots
            .iter()
            .fold(Self::one(), |acc, r| &acc * &Self::linear_root(r.clone()))
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    pub fn eval(&self, z: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z.clone() + c.clone();
        }
        acc
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    /// `p(c z)`.
    pub fn dilate(&self, c: &F) -> Self {
        let mut pow = F::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for x in &self.coeffs {
            out.push(x.clone() * pow.clone());
            pow = pow * c.clone();
        }
        Self::new(out)
    }

    /// Divided by the leading coefficient.
    pub fn monic(&self) -> Option<Self> {
        let l = self.leading();
        let inv = F::one().checked_div(&l)?;
        Some(self.scale(&inv))
    }

    /// Long division; `None` when dividing by zero.
    pub fn div_rem(&self, d: &Self) -> Option<(Self, Self)> {
        let dd = d.degree()?;
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Some((Self::zero(), self.clone()));
        }
        let mut quot = vec![F::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].checked_div(&lead)?;
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] = rem[k + i].clone() - c.clone() * dc.clone();
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Some((Self::new(quot), Self::new(rem)))
    }

    /// Largest coefficient magnitude.
    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn to_c64(&self) -> UPoly<C64> {
        UPoly::new(self.coeffs.iter().map(|c| c.to_c64()).collect())
    }
}

impl<F: Field> Add for &UPoly<F> {
    type Output = UPoly<F>;
    fn add(self, rhs: &UPoly<F>) -> UPoly<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<F: Field> Sub for &UPoly<F> {
    type Output = UPoly<F>;
    fn sub(self, rhs: &UPoly<F>) -> UPoly<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<F: Field> Mul for &UPoly<F> {
    type Output = UPoly<F>;
    fn mul(self, rhs: &UPoly<F>) -> UPoly<F> {
        if self.is_zero() || rhs.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        UPoly::new(out)
    }
}

impl<F: Field> Neg for &UPoly<F> {
    type Output = UPoly<F>;
    fn neg(self) -> UPoly<F> {
        UPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<F: Field> fmt::Debug for UPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UPoly{:?}", self.coeffs)
    }
}

/// Elements a small determinant can be expanded over.
pub trait Ring: Clone {
    fn zero_like(&self) -> Self;
    fn r_add(&self, o: &Self) -> Self;
    fn r_sub(&self, o: &Self) -> Self;
    fn r_mul(&self, o: &Self) -> Self;
}

impl<F: Field> Ring for UPoly<F> {
    fn zero_like(&self) -> Self {
        UPoly::zero()
    }
    fn r_add(&self, o: &Self) -> Self {
        self + o
    }
    fn r_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn r_mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Ring for C64 {
    fn zero_like(&self) -> Self {
        C64::new(0.0, 0.0)
    }
    fn r_add(&self, o: &Self) -> Self {
        self + o
    }
    fn r_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn r_mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Ring for Rational {
    fn zero_like(&self) -> Self {
        Zero::zero()
    }
    fn r_add(&self, o: &Self) -> Self {
        self + o
    }
    fn r_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn r_mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Ring for LaurentPoly {
    fn zero_like(&self) -> Self {
        LaurentPoly::zero(self.registry())
    }
    fn r_add(&self, o: &Self) -> Self {
        self + o
    }
    fn r_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn r_mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Ring for RationalFunction {
    fn zero_like(&self) -> Self {
        RationalFunction::zero(self.registry())
    }
    fn r_add(&self, o: &Self) -> Self {
        self + o
    }
    fn r_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn r_mul(&self, o: &Self) -> Self {
        self * o
    }
}

/// Laplace expansion along the first row; fine for the k <= 5 minors used here.
pub fn det<R: Ring>(m: &[Vec<R>]) -> R {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|r| r.len() == n), "square matrix");
    if n == 1 {
        return m[0][0].clone();
    }
    if n == 2 {
        return m[0][0].r_mul(&m[1][1]).r_sub(&m[0][1].r_mul(&m[1][0]));
    }
    let mut acc = m[0][0].zero_like();
    for c in 0..n {
        let minor: Vec<Vec<R>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
            .collect();
        let t = m[0][c].r_mul(&det(&minor));
        acc = if c % 2 == 0 { acc.r_add(&t) } else { acc.r_sub(&t) };
    }
    acc
}

/// Roots of a polynomial with complex coefficients (Aberth iteration, then
/// Newton polish). Returns `deg` roots with multiplicity.
pub fn roots(p: &UPoly<C64>) -> Vec<C64> {
    let n = match p.degree() {
        None | Some(0) => return vec![],
        Some(n) => n,
    };
    let p = p.monic().expect("nonzero leading coefficient");
    if n == 1 {
        return vec![-p.coeff(0)];
    }
    let dp = derivative(&p);
    // Cauchy bound for the initial circle.
    let radius = 1.0 + (0..n).map(|k| p.coeff(k).norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius * 0.5 + 0.1, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let pv = p.eval(&z[i]);
            let dv = dp.eval(&z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dv;
            let s: C64 = (0..n).filter(|&j| j != i).map(|j| C64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = dp.eval(zi);
            if d.norm() == 0.0 {
                break;
            }
            let step = p.eval(zi) / d;
            if !step.is_finite() {
                break;
            }
            *zi -= step;
        }
    }
    z
}

pub fn derivative<F: Field>(p: &UPoly<F>) -> UPoly<F> {
    UPoly::new(
        p.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * F::from_i64(k as i64))
            .collect(),
    )
}

/// Elementary symmetric polynomials `e_0..e_n` of the given values.
pub fn elementary<F: Field>(xs: &[F]) -> Vec<F> {
    let mut e = vec![F::zero(); xs.len() + 1];
    e[0] = F::one();
    for (k, x) in xs.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            e[j] = e[j].clone() + e[j - 1].clone() * x.clone();
        }
    }
    e
}

/// Like [`elementary`] over any ring, given its unit.
pub fn elementary_with<R: Ring>(xs: &[R], one: R) -> Vec<R> {
    let mut e = vec![one.zero_like(); xs.len() + 1];
    e[0] = one;
    for (k, x) in xs.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            e[j] = e[j].r_add(&e[j - 1].r_mul(x));
        }
    }
    e
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All permutations of `0..n` (Heap's algorithm order is not needed; lexicographic).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn roots_of_a_cubic() {
        let rs = [c(1.0, 0.5), c(-2.0, 0.0), c(0.3, -1.1)];
        let p = UPoly::from_roots(&rs);
        let mut found = roots(&p);
        for r in rs {
            let (k, d) = found
                .iter()
                .enumerate()
                .map(|(k, z)| (k, (z - r).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(d < 1e-12, "root {r} missed by {d}");
            found.remove(k);
        }
    }

    #[test]
    fn exact_division() {
        let p = UPoly::<Rational>::from_roots(&[Field::from_i64(2), Field::from_i64(-3)]);
        let (q, r) = p.div_rem(&UPoly::linear_root(Field::from_i64(2))).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, UPoly::linear_root(Field::from_i64(-3)));
    }

    #[test]
    fn determinant_and_symmetric_functions() {
        let m: Vec<Vec<C64>> = vec![
            vec![c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(4.0, 0.0)],
        ];
        assert!((det(&m) - c(18.0, 0.0)).norm() < 1e-12);
        let e = elementary(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(e, vec![c(1.0, 0.0), c(6.0, 0.0), c(11.0, 0.0), c(6.0, 0.0)]);
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(permutations(3).len(), 6);
    }
}
