//! Macdonald polynomials in the monomial basis, truncation loci and eigenchecks
//! against the tRS operators at coupling `t = h`.
//!
//! Variables: `xi1..xin`, `q`, `h`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use qoper_algebra::{LaurentPoly, Rational, RationalFunction, Registry};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{det, elementary_with, permutations};
use crate::trs::{trs_hamiltonian, TrsFrame};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: &[u32]) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid(format!("{parts:?} is not weakly decreasing")));
        }
        Ok(Partition(parts.to_vec()))
    }

    /// Pads with zeros to length `n`.
    pub fn padded(parts: &[u32], n: usize) -> Result<Self> {
        let nonzero: Vec<u32> = parts.iter().copied().filter(|&p| p > 0).collect();
        if nonzero.len() > n {
            return Err(Error::Invalid(format!("{parts:?} has more than {n} parts")));
        }
        let mut v = parts.to_vec();
        while v.len() > n && v.last() == Some(&0) {
            v.pop();
        }
        v.resize(n, 0);
        Partition::new(&v)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of nonzero parts.
    pub fn length(&self) -> usize {
        self.0.iter().filter(|&&p| p > 0).count()
    }

    /// `self >= other` in dominance order.
    pub fn dominates(&self, other: &Partition) -> bool {
        if self.size() != other.size() {
            return false;
        }
        let (mut a, mut b) = (0, 0);
        for i in 0..self.n().max(other.n()) {
            a += self.0.get(i).copied().unwrap_or(0);
            b += other.0.get(i).copied().unwrap_or(0);
            if a < b {
                return false;
            }
        }
        true
    }

    /// Partitions of `size` with at most `n` parts, padded to `n`, in
    /// decreasing lexicographic order.
    pub fn all(size: u32, n: usize) -> Vec<Partition> {
        fn rec(rest: u32, max: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if slots == 0 {
                if rest == 0 {
                    out.push(Partition(cur.clone()));
                }
                return;
            }
            for p in (0..=max.min(rest)).rev() {
                cur.push(p);
                rec(rest - p, p, slots - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = vec![];
        rec(size, size, n, &mut vec![], &mut out);
        out
    }

    /// Distinct rearrangements of the parts.
    pub fn rearrangements(&self) -> Vec<Vec<u32>> {
        let set: BTreeSet<Vec<u32>> = permutations(self.n())
            .into_iter()
            .map(|s| s.iter().map(|&i| self.0[i]).collect())
            .collect();
        set.into_iter().collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.is_empty() {
            return Ok(Partition(vec![]));
        }
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|e| Error::Invalid(format!("bad part {p:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(&parts)
    }
}

pub fn xi_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("xi{i}")).collect()
}

/// `xi1..xin, q, h`.
pub fn macdonald_registry(n: usize) -> Registry {
    let mut v = xi_names(n);
    v.push("q".into());
    v.push("h".into());
    Registry::new(&v)
}

/// `m_mu(xi_1..xi_n)`.
pub fn monomial_symmetric(reg: &Registry, n: usize, mu: &Partition) -> Result<LaurentPoly> {
    let idx: Vec<usize> = xi_names(n).iter().map(|x| reg.require(x)).collect::<std::result::Result<_, _>>()?;
    let mut out = LaurentPoly::zero(reg);
    for arr in mu.rearrangements() {
        let mut e = vec![0i32; reg.len()];
        for (k, &i) in idx.iter().enumerate() {
            e[i] = arr[k] as i32;
        }
        out = &out + &LaurentPoly::monomial(reg, e.into(), Rational::one());
    }
    Ok(out)
}

/// A symmetric polynomial in `xi1..xin` as coefficients on the monomial basis.
#[derive(Clone, Debug)]
pub struct SymmetricPolynomial {
    n: usize,
    reg: Registry,
    coeffs: BTreeMap<Partition, RationalFunction>,
}

impl PartialEq for SymmetricPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.difference(other).map(|d| d.is_zero()).unwrap_or(false)
    }
}

impl SymmetricPolynomial {
    pub fn zero(n: usize, reg: &Registry) -> Self {
        SymmetricPolynomial {
            n,
            reg: reg.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn registry(&self) -> &Registry {
        &self.reg
    }

    pub fn coeffs(&self) -> &BTreeMap<Partition, RationalFunction> {
        &self.coeffs
    }

    pub fn coeff(&self, mu: &Partition) -> Option<&RationalFunction> {
        self.coeffs.get(mu)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn insert(&mut self, mu: Partition, c: RationalFunction) -> Result<()> {
        let c = c.to_registry(&self.reg.union(c.registry()))?;
        self.reg = self.reg.union(c.registry());
        let entry = match self.coeffs.remove(&mu) {
            Some(old) => &old + &c,
            None => c,
        };
        if !entry.is_zero() {
            self.coeffs.insert(mu, entry);
        }
        Ok(())
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        let mut out = Self::zero(self.n, &self.reg.union(c.registry()));
        for (mu, v) in &self.coeffs {
            out.insert(mu.clone(), v * c).expect("registry union");
        }
        out
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (mu, v) in &other.coeffs {
            out.insert(mu.clone(), -v)?;
        }
        Ok(out)
    }

    pub fn to_rational_function(&self) -> Result<RationalFunction> {
        let reg = self.reg.union(&macdonald_registry(self.n));
        let mut out = RationalFunction::zero(&reg);
        for (mu, c) in &self.coeffs {
            let m = RationalFunction::from(monomial_symmetric(&reg, self.n, mu)?);
            out = &out + &(&m * c);
        }
        Ok(out)
    }

    /// Reads a polynomial in `xi1..xin` (coefficients rational in the other
    /// variables) back into the monomial basis; fails if it is not symmetric.
    pub fn from_rational_function(f: &RationalFunction, n: usize) -> Result<Self> {
        let reg = f.registry().union(&macdonald_registry(n));
        let f = f.to_registry(&reg)?;
        let xs = xi_names(n);
        for (atom, _) in f.denominator_factors() {
            if xs.iter().any(|x| atom.involves(x)) {
                return Err(Error::Invalid(format!("not polynomial in the xi variables: {f}")));
            }
        }
        let idx: Vec<usize> = xs.iter().map(|x| reg.require(x)).collect::<std::result::Result<_, _>>()?;
        let den = f.denominator();
        let mut split: BTreeMap<Vec<i32>, LaurentPoly> = BTreeMap::new();
        for (e, c) in f.numerator().terms() {
            let xe: Vec<i32> = idx.iter().map(|&i| e[i]).collect();
            if xe.iter().any(|&v| v < 0) {
                return Err(Error::Invalid("negative power of a xi variable".into()));
            }
            let mut rest = e.to_vec();
            for &i in &idx {
                rest[i] = 0;
            }
            let term = LaurentPoly::monomial(&reg, rest.into(), c.clone());
            let slot = split.entry(xe).or_insert_with(|| LaurentPoly::zero(&reg));
            *slot = &*slot + &term;
        }
        let mut out = Self::zero(n, &reg);
        for (xe, c) in &split {
            let mut sorted: Vec<u32> = xe.iter().map(|&v| v as u32).collect();
            sorted.sort_unstable_by(|a, b| b.cmp(a));
            if *xe == sorted.iter().map(|&v| v as i32).collect::<Vec<_>>() {
                out.insert(Partition(sorted), RationalFunction::new(c.clone(), den.clone())?)?;
            }
        }
        // every rearrangement must carry the same coefficient
        for (mu, c) in &out.coeffs {
            for arr in mu.rearrangements() {
                let key: Vec<i32> = arr.iter().map(|&v| v as i32).collect();
                let got = split.get(&key).map(|p| RationalFunction::new(p.clone(), den.clone())).transpose()?;
                if got.as_ref() != Some(c) {
                    return Err(Error::Invalid(format!("not symmetric at exponent {key:?}")));
                }
            }
        }
        let total: usize = out.coeffs.keys().map(|mu| mu.rearrangements().len()).sum();
        if total != split.len() {
            return Err(Error::Invalid("not symmetric".into()));
        }
        Ok(out)
    }

    /// Substitutes `var -> value` (a monomial) in every coefficient.
    pub fn substitute(&self, var: &str, value: &LaurentPoly) -> Result<Self> {
        let mut out = Self::zero(self.n, &self.reg.union(value.registry()));
        for (mu, c) in &self.coeffs {
            out.insert(mu.clone(), c.substitute(var, value)?)?;
        }
        Ok(out)
    }
}

impl fmt::Display for SymmetricPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().rev().map(|(mu, c)| format!("[{c}] m{mu}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn frame(n: usize) -> TrsFrame {
    TrsFrame::generic(n, "xi", "h")
}

fn apply_hamiltonian(n: usize, k: usize, f: &SymmetricPolynomial) -> Result<SymmetricPolynomial> {
    let h = trs_hamiltonian(&frame(n), k)?;
    let out = h.apply(&f.to_rational_function()?)?;
    SymmetricPolynomial::from_rational_function(&out, n)
}

/// `P_lambda` as the triangular eigenvector of `H_1(t = h)`, normalized so the
/// coefficient of `m_lambda` is 1.
pub fn macdonald_oracle(lambda: &Partition, n: usize) -> Result<SymmetricPolynomial> {
    let lambda = Partition::padded(lambda.parts(), n)?;
    let reg = macdonald_registry(n);
    let basis: Vec<Partition> = Partition::all(lambda.size(), n)
        .into_iter()
        .filter(|mu| lambda.dominates(mu))
        .collect();
    let images: Vec<SymmetricPolynomial> = basis
        .par_iter()
        .map(|mu| {
            let mut m = SymmetricPolynomial::zero(n, &reg);
            m.insert(mu.clone(), RationalFunction::one(&reg))?;
            apply_hamiltonian(n, 1, &m)
        })
        .collect::<Result<_>>()?;
    let zero = RationalFunction::zero(&reg);
    let c = |mu: usize, nu: usize| images[mu].coeff(&basis[nu]).cloned().unwrap_or_else(|| zero.clone());
    let eps = c(0, 0);
    let mut u: Vec<RationalFunction> = vec![RationalFunction::one(&reg)];
    for nu in 1..basis.len() {
        let mut acc = zero.clone();
        for (mu, um) in u.iter().enumerate() {
            acc = &acc + &(um * &c(mu, nu));
        }
        let gap = &eps - &c(nu, nu);
        u.push(acc.checked_div(&gap)?);
    }
    let mut out = SymmetricPolynomial::zero(n, &reg);
    for (mu, coeff) in basis.into_iter().zip(u) {
        out.insert(mu, coeff)?;
    }
    Ok(out)
}

fn z_factor(rho: &Partition) -> Rational {
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for &p in rho.parts().iter().filter(|&&p| p > 0) {
        *counts.entry(p).or_default() += 1;
    }
    let mut z = Rational::one();
    for (p, m) in counts {
        z *= Rational::from_integer(p.into()).pow(m as i32);
        for k in 1..=m {
            z *= Rational::from_integer(k.into());
        }
    }
    z
}

fn invert_rational(m: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Invalid("singular transition matrix".into()))?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v /= p.clone();
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let d = f.clone() * a[col][c].clone();
                    a[r][c] -= d;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Second oracle: Gram-Schmidt on the monomial basis with respect to
/// `<p_rho, p_sigma> = delta z_rho prod (1 - q^rho_i)/(1 - h^rho_i)`.
pub fn macdonald_gram_schmidt(lambda: &Partition, n: usize) -> Result<SymmetricPolynomial> {
    let d = lambda.size();
    if d > 6 {
        return Err(Error::Invalid("Gram-Schmidt oracle is limited to |lambda| <= 6".into()));
    }
    let lambda_n = Partition::padded(lambda.parts(), n)?;
    if d == 0 {
        let mut out = SymmetricPolynomial::zero(n, &macdonald_registry(n));
        out.insert(lambda_n, RationalFunction::one(&macdonald_registry(n)))?;
        return Ok(out);
    }
    let dn = d as usize;
    let reg = macdonald_registry(dn);
    // increasing in dominance-compatible order
    let mut parts = Partition::all(d, dn);
    parts.reverse();
    let xs = xi_names(dn);
    let power = |k: u32| -> LaurentPoly {
        xs.iter()
            .map(|x| LaurentPoly::var_pow(&reg, x, k as i32).unwrap())
            .fold(LaurentPoly::zero(&reg), |a, b| &a + &b)
    };
    let l: Vec<Vec<Rational>> = parts
        .iter()
        .map(|rho| {
            let p = rho
                .parts()
                .iter()
                .filter(|&&r| r > 0)
                .fold(LaurentPoly::one(&reg), |acc, &r| &acc * &power(r));
            parts
                .iter()
                .map(|mu| {
                    let mut e = vec![0i32; reg.len()];
                    for (i, &m) in mu.parts().iter().enumerate() {
                        e[i] = m as i32;
                    }
                    p.coeff(&e)
                })
                .collect()
        })
        .collect();
    let linv = invert_rational(&l)?;
    // weights times lcm_rho prod_i (1 - h^rho_i), built from cyclotomic factors
    let one = LaurentPoly::one(&reg);
    let h = LaurentPoly::var(&reg, "h")?;
    let mut cyclo: Vec<LaurentPoly> = vec![one.clone()];
    for k in 1..=d {
        let mut c = &h.pow(k) - &one;
        for e in (1..k).filter(|e| k % e == 0) {
            c = c.exact_div(&cyclo[e as usize]).expect("cyclotomic division");
        }
        cyclo.push(c);
    }
    let mut lcm = one.clone();
    for k in 1..=d {
        let mult = parts
            .iter()
            .map(|rho| rho.parts().iter().filter(|&&r| r > 0 && r % k == 0).count())
            .max()
            .unwrap_or(0);
        lcm = &lcm * &cyclo[k as usize].pow(mult as u32);
    }
    let weight: Vec<LaurentPoly> = parts
        .iter()
        .map(|rho| {
            let mut w = LaurentPoly::constant(&reg, z_factor(rho));
            let mut hden = one.clone();
            for &r in rho.parts().iter().filter(|&&r| r > 0) {
                w = &w * &(&one - &LaurentPoly::var_pow(&reg, "q", r as i32)?);
                hden = &hden * &(&h.pow(r) - &one);
            }
            let cof = lcm.exact_div(&hden).expect("lcm is a multiple");
            let sign = if rho.length() % 2 == 0 { 1 } else { -1 };
            Ok((&w * &cof).scale(&Rational::from_integer(sign.into())))
        })
        .collect::<Result<_>>()?;
    let m = parts.len();
    let gram: Vec<Vec<LaurentPoly>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| {
                    (0..m).fold(LaurentPoly::zero(&reg), |acc, r| {
                        let c = linv[a][r].clone() * linv[b][r].clone();
                        if c.is_zero() {
                            acc
                        } else {
                            &acc + &weight[r].scale(&c)
                        }
                    })
                })
                .collect()
        })
        .collect();
    let target = parts
        .iter()
        .position(|p| p.length() == lambda.length() && p.parts()[..lambda.length()] == lambda_n.parts()[..lambda.length()])
        .ok_or_else(|| Error::Invalid(format!("{lambda} not found")))?;
    // P = m_target + sum_{mu < target} u_mu m_mu orthogonal to every earlier m_nu
    let k = target;
    let mut coeffs: Vec<RationalFunction> = vec![RationalFunction::zero(&reg); m];
    coeffs[target] = RationalFunction::one(&reg);
    if k > 0 {
        let a: Vec<Vec<LaurentPoly>> = (0..k).map(|nu| (0..k).map(|mu| gram[mu][nu].clone()).collect()).collect();
        let rhs: Vec<LaurentPoly> = (0..k).map(|nu| -&gram[target][nu]).collect();
        let d = det(&a);
        if d.is_zero() {
            return Err(Error::Invalid("degenerate Gram matrix".into()));
        }
        let sol: Vec<RationalFunction> = (0..k)
            .into_par_iter()
            .map(|mu| {
                let mut am = a.clone();
                for nu in 0..k {
                    am[nu][mu] = rhs[nu].clone();
                }
                Ok(RationalFunction::new(det(&am), d.clone())?)
            })
            .collect::<Result<_>>()?;
        coeffs[..k].clone_from_slice(&sol);
    }
    let out_reg = macdonald_registry(n);
    let mut out = SymmetricPolynomial::zero(n, &out_reg);
    for (mu, c) in parts.iter().zip(&coeffs) {
        if mu.length() <= n && !c.is_zero() {
            out.insert(Partition::padded(mu.parts(), n)?, c.to_registry(&reg.union(&out_reg))?)?;
        }
    }
    Ok(out)
}

/// Schur polynomial via the bialternant `det(xi_i^{lambda_j + n - j}) / det(xi_i^{n - j})`.
pub fn schur_polynomial(lambda: &Partition, n: usize) -> Result<SymmetricPolynomial> {
    let lambda = Partition::padded(lambda.parts(), n)?;
    let reg = macdonald_registry(n);
    let xs = xi_names(n);
    let alt = |shift: &dyn Fn(usize) -> i32| -> LaurentPoly {
        let m: Vec<Vec<LaurentPoly>> = xs
            .iter()
            .map(|x| (0..n).map(|j| LaurentPoly::var_pow(&reg, x, shift(j)).unwrap()).collect())
            .collect();
        det(&m)
    };
    let num = alt(&|j| (lambda.parts()[j] as usize + n - 1 - j) as i32);
    let den = alt(&|j| (n - 1 - j) as i32);
    let s = num
        .exact_div(&den)
        .ok_or_else(|| Error::Invalid("bialternant not divisible".into()))?;
    SymmetricPolynomial::from_rational_function(&RationalFunction::from(s), n)
}

/// Direction of the `h` exponent in the truncation locus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LocusConvention {
    /// `a_{i+1}/a_i = q^{lambda_{i+1} - lambda_i} h`.
    Paper,
    /// `a_{i+1}/a_i = q^{lambda_{i+1} - lambda_i} h^{-1}`.
    HbarInverted,
}

impl LocusConvention {
    /// The direction under which the tRS eigenvalues on `P_lambda` are `e_k(a)`.
    pub const fn resolved() -> Self {
        LocusConvention::HbarInverted
    }

    pub fn other(self) -> Self {
        match self {
            LocusConvention::Paper => LocusConvention::HbarInverted,
            LocusConvention::HbarInverted => LocusConvention::Paper,
        }
    }
}

/// The `n - 1` ratios `a_{i+1}/a_i` as monomials in `q, h`.
pub fn truncation_locus(lambda: &Partition, convention: LocusConvention) -> Vec<LaurentPoly> {
    let reg = Registry::new(&["q", "h"]);
    let hdir = match convention {
        LocusConvention::Paper => 1,
        LocusConvention::HbarInverted => -1,
    };
    lambda
        .parts()
        .windows(2)
        .map(|w| {
            let l = w[1] as i32 - w[0] as i32;
            LaurentPoly::monomial(&reg, vec![l, hdir].into(), Rational::one())
        })
        .collect()
}

/// `a_1 = 1` and `a_{i+1} = a_i * ratio_i`.
pub fn locus_point(lambda: &Partition, convention: LocusConvention) -> Vec<LaurentPoly> {
    let ratios = truncation_locus(lambda, convention);
    let reg = Registry::new(&["q", "h"]);
    let mut out = vec![LaurentPoly::one(&reg)];
    for r in ratios {
        let next = out.last().unwrap() * &r;
        out.push(next);
    }
    out
}

#[derive(Clone, Debug)]
pub struct LocusMatch {
    pub convention: LocusConvention,
    /// `epsilon_1 / e_1(a)` with `a_1 = 1`.
    pub scale: RationalFunction,
    /// `h^{k(k-1)/2} epsilon_k == scale^k e_k(a)` per `k`.
    pub matches: Vec<bool>,
}

impl LocusMatch {
    pub fn all(&self) -> bool {
        self.matches.iter().all(|&b| b)
    }
}

#[derive(Clone, Debug)]
pub struct EigenReport {
    pub lambda: Partition,
    pub n: usize,
    pub polynomial: SymmetricPolynomial,
    /// `epsilon_1..epsilon_n`.
    pub eigenvalues: Vec<RationalFunction>,
    /// `h^{-k(k-1)/2} e_k(q^{lambda_i} h^{n-i})`.
    pub expected: Vec<RationalFunction>,
    /// `H_k P - epsilon_k P`; empty when exact.
    pub residuals: Vec<SymmetricPolynomial>,
    pub locus: Vec<LocusMatch>,
}

impl EigenReport {
    pub fn simultaneous(&self) -> bool {
        self.residuals.iter().all(|r| r.is_zero())
    }

    pub fn eigenvalues_match_formula(&self) -> bool {
        self.eigenvalues.iter().zip(&self.expected).all(|(a, b)| a == b)
    }

    pub fn locus_for(&self, c: LocusConvention) -> Option<&LocusMatch> {
        self.locus.iter().find(|l| l.convention == c)
    }

    /// `epsilon_n == q^{|lambda|}`.
    pub fn top_eigenvalue_is_q_power(&self) -> bool {
        let reg = self.eigenvalues[0].registry().clone();
        match LaurentPoly::var_pow(&reg, "q", self.lambda.size() as i32) {
            Ok(qp) => self.eigenvalues.last() == Some(&RationalFunction::from(qp)),
            Err(_) => false,
        }
    }
}

/// Applies every `H_k(t = h)` to `P_lambda` and compares eigenvalues with the
/// truncation locus in both conventions.
pub fn eigencheck(lambda: &Partition, n: usize) -> Result<EigenReport> {
    let lambda = Partition::padded(lambda.parts(), n)?;
    let p = macdonald_oracle(&lambda, n)?;
    let reg = macdonald_registry(n);
    let results: Vec<(RationalFunction, SymmetricPolynomial)> = (1..=n)
        .into_par_iter()
        .map(|k| {
            let image = apply_hamiltonian(n, k, &p)?;
            let eps = image.coeff(&lambda).cloned().unwrap_or_else(|| RationalFunction::zero(&reg));
            let residual = image.difference(&p.scale(&eps))?;
            Ok((eps, residual))
        })
        .collect::<Result<_>>()?;
    let (eigenvalues, residuals): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let spectrum: Vec<RationalFunction> = (0..n)
        .map(|i| {
            let e = vec![0; n].into_iter().chain([lambda.parts()[i] as i32, (n - 1 - i) as i32]).collect::<Vec<_>>();
            RationalFunction::from(LaurentPoly::monomial(&reg, e.into(), Rational::one()))
        })
        .collect();
    let hpow = |k: usize| -> Result<RationalFunction> { Ok(RationalFunction::var_pow(&reg, "h", (k * (k.saturating_sub(1)) / 2) as i32)?) };
    let expected = elementary_with(&spectrum, RationalFunction::one(&reg))
        .into_iter()
        .enumerate()
        .map(|(k, e)| Ok(e.checked_div(&hpow(k)?)?))
        .collect::<Result<Vec<_>>>()?;
    let locus = [LocusConvention::Paper, LocusConvention::HbarInverted]
        .into_iter()
        .map(|conv| {
            let a: Vec<RationalFunction> = locus_point(&lambda, conv)
                .into_iter()
                .map(|x| RationalFunction::from(x).to_registry(&reg))
                .collect::<std::result::Result<_, _>>()?;
            let ek = elementary_with(&a, RationalFunction::one(&reg));
            let scale = eigenvalues[0].checked_div(&ek[1])?;
            let matches = (1..=n)
                .map(|k| Ok(&eigenvalues[k - 1] * &hpow(k)? == &scale.pow(k as i32)? * &ek[k]))
                .collect::<Result<_>>()?;
            Ok(LocusMatch {
                convention: conv,
                scale,
                matches,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EigenReport {
        lambda,
        n,
        polynomial: p,
        eigenvalues,
        expected: expected[1..].to_vec(),
        residuals: residuals.into_iter().filter(|r| !r.is_zero()).collect(),
        locus,
    })
}

/// `P_lambda` at `h = q` compared with the Schur polynomial.
pub fn schur_specialization_check(lambda: &Partition, n: usize) -> Result<bool> {
    let p = macdonald_oracle(lambda, n)?;
    let q = LaurentPoly::var(p.registry(), "q")?;
    let at = p.substitute("h", &q)?;
    Ok(at == schur_polynomial(lambda, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qoper_algebra::parse_rational_function;

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn partitions_and_dominance() {
        let all = Partition::all(4, 4);
        assert_eq!(all.len(), 5);
        assert_eq!(all[0], part("4,0,0,0"));
        assert_eq!(Partition::all(4, 2).len(), 3);
        assert!(part("3,1").dominates(&part("2,2")));
        assert!(!part("2,2").dominates(&part("3,1")));
        assert!(!part("3,3,0,0,0,0").dominates(&part("4,1,1,0,0,0")));
        assert!(!part("4,1,1,0,0,0").dominates(&part("3,3,0,0,0,0")));
        assert!(Partition::new(&[1, 2]).is_err());
        assert_eq!(part("2,1,0").rearrangements().len(), 6);
    }

    #[test]
    fn small_oracles() {
        let p = macdonald_oracle(&part("1"), 3).unwrap();
        assert_eq!(p.coeffs().len(), 1);
        let p = macdonald_oracle(&part("1,1"), 2).unwrap();
        assert_eq!(p.coeffs().len(), 1);
        let p = macdonald_oracle(&part("2"), 2).unwrap();
        let reg = p.registry().clone();
        let c = parse_rational_function(&reg, "(1+q)*(1-h)/(1-q*h)").unwrap();
        assert_eq!(p.coeff(&part("1,1")).unwrap(), &c);
    }

    #[test]
    fn schur_of_two_one() {
        // s_(2,1)(x1,x2,x3) = m_(2,1) + 2 m_(1,1,1)
        let s = schur_polynomial(&part("2,1"), 3).unwrap();
        assert!(s.coeff(&part("2,1,0")).unwrap().is_one());
        assert_eq!(s.coeff(&part("1,1,1")).unwrap().as_constant(), Some(Rational::from_integer(2.into())));
    }

    #[test]
    fn loci() {
        let l = truncation_locus(&part("1,0"), LocusConvention::Paper);
        assert_eq!(l[0].to_string(), LaurentPoly::monomial(l[0].registry(), vec![-1, 1].into(), Rational::one()).to_string());
        let z = truncation_locus(&part("0,0,0"), LocusConvention::Paper);
        assert!(z.iter().all(|r| r.coeff(&[0, 1]) == Rational::one()));
    }

    #[test]
    fn from_rational_function_rejects_asymmetric() {
        let reg = macdonald_registry(2);
        let f = parse_rational_function(&reg, "xi1^2 + q*xi2").unwrap();
        assert!(SymmetricPolynomial::from_rational_function(&f, 2).is_err());
    }
}
