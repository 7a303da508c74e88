//! Vertex functions of the cotangent bundle to the full flag variety as
//! truncated series in `z_i = xi_i/xi_{i+1}`, their truncation to Macdonald
//! polynomials, and order-by-order tRS eigen residuals.
//!
//! Coefficient variables: `a1..an`, `q`, `h`. Series variables: `z1..z_{n-1}`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use qoper_algebra::shift::shift_map;
use qoper_algebra::{q_pochhammer, LaurentPoly, Rational, RationalFunction, Registry, TruncatedSeries};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::macdonald::{locus_point, macdonald_oracle, macdonald_registry, LocusConvention, Partition, SymmetricPolynomial};
use crate::numeric::{permutations, subsets};
use crate::trs::{trs_hamiltonian, TrsFrame};

pub fn a_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("a{i}")).collect()
}

pub fn z_names(n: usize) -> Vec<String> {
    (1..n).map(|i| format!("z{i}")).collect()
}

/// `a1..an, q, h`.
pub fn vertex_registry(n: usize) -> Registry {
    let mut v = a_names(n);
    v.push("q".into());
    v.push("h".into());
    Registry::new(&v)
}

/// A chain `S_1 ⊂ S_2 ⊂ ... ⊂ S_n = {1..n}` with `|S_i| = i` (stored 0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlagFixedPoint {
    chain: Vec<Vec<usize>>,
}

impl FlagFixedPoint {
    pub fn new(chain: Vec<Vec<usize>>) -> Result<Self> {
        let n = chain.len();
        let mut sorted = Vec::with_capacity(n);
        for (i, s) in chain.into_iter().enumerate() {
            let mut s = s;
            s.sort_unstable();
            s.dedup();
            if s.len() != i + 1 || s.iter().any(|&k| k >= n) {
                return Err(Error::Invalid(format!("S_{} must have {} distinct elements below {n}", i + 1, i + 1)));
            }
            if let Some(prev) = sorted.last() {
                let prev: &Vec<usize> = prev;
                if !prev.iter().all(|k| s.contains(k)) {
                    return Err(Error::Invalid(format!("S_{i} is not contained in S_{}", i + 1)));
                }
            }
            sorted.push(s);
        }
        Ok(FlagFixedPoint { chain: sorted })
    }

    /// `S_i = {perm[0], ..., perm[i-1]}`.
    pub fn from_permutation(perm: &[usize]) -> Result<Self> {
        Self::new((1..=perm.len()).map(|i| perm[..i].to_vec()).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_permutation(&(0..n).collect::<Vec<_>>()).expect("identity chain")
    }

    pub fn all(n: usize) -> Vec<Self> {
        permutations(n)
            .into_iter()
            .map(|p| Self::from_permutation(&p).expect("permutation chain"))
            .collect()
    }

    pub fn n(&self) -> usize {
        self.chain.len()
    }

    pub fn subset(&self, i: usize) -> &[usize] {
        &self.chain[i]
    }
}

impl fmt::Display for FlagFixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .chain
            .iter()
            .map(|s| format!("{{{}}}", s.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Products of `1 - x q^k` factors. Factors vanishing on a specialization are
/// kept aside with their order in the approach parameter `u`, so 0/0 terms
/// resolve to the limit `u -> 1`.
struct FactorProduct {
    num: LaurentPoly,
    den: LaurentPoly,
    num_zeros: Vec<i32>,
    den_zeros: Vec<i32>,
}

impl FactorProduct {
    fn new(reg: &Registry) -> Self {
        FactorProduct {
            num: LaurentPoly::one(reg),
            den: LaurentPoly::one(reg),
            num_zeros: vec![],
            den_zeros: vec![],
        }
    }

    fn push(&mut self, factor: LaurentPoly, upstairs: bool, order: i32) {
        match (factor.is_zero(), upstairs) {
            (true, true) => self.num_zeros.push(order),
            (true, false) => self.den_zeros.push(order),
            (false, true) => self.num = &self.num * &factor,
            (false, false) => self.den = &self.den * &factor,
        }
    }

    fn multiply(&mut self, m: &LaurentPoly) {
        self.num = &self.num * m;
    }

    /// `(x; q)_m` on the given side; negative `m` lands on the other side.
    fn pochhammer(&mut self, x: &LaurentPoly, q: &LaurentPoly, m: i32, upstairs: bool, order: i32) {
        let one = LaurentPoly::one(x.registry());
        if m >= 0 {
            for k in 0..m {
                self.push(&one - &(x * &q.pow(k as u32)), upstairs, order);
            }
        } else {
            let qinv = LaurentPoly::monomial(
                q.registry(),
                q.as_monomial().map(|(e, _)| e.iter().map(|v| -v).collect::<Vec<_>>()).unwrap_or_default().into(),
                Rational::one(),
            );
            for k in 1..=(-m) {
                self.push(&one - &(x * &qinv.pow(k as u32)), !upstairs, order);
            }
        }
    }

    fn finish(self, what: impl Fn() -> String) -> Result<Option<RationalFunction>> {
        use std::cmp::Ordering::*;
        let hard = |v: &[i32]| v.iter().filter(|&&o| o == 0).count();
        let (hn, hd) = (hard(&self.num_zeros), hard(&self.den_zeros));
        if hd > 0 {
            return Err(if hn > 0 { Error::Indeterminate(what()) } else { Error::Pole(what()) });
        }
        if hn > 0 {
            return Ok(None);
        }
        match self.num_zeros.len().cmp(&self.den_zeros.len()) {
            Greater => Ok(None),
            Less => Err(Error::Pole(what())),
            // (1 - u^a)/(1 - u^b) -> a/b
            Equal => {
                let prod = |v: &[i32]| v.iter().fold(Rational::one(), |acc, &o| acc * Rational::from_integer(o.into()));
                let limit = prod(&self.num_zeros) / prod(&self.den_zeros);
                Ok(Some(RationalFunction::new(self.num, self.den)?.scale(&limit)))
            }
        }
    }
}

/// Values for `a1..an`: symbolic, or specialized to Laurent monomials and
/// approached along `a_i -> a_i u^{approach_i}`.
#[derive(Clone, Debug)]
pub enum EquivariantValues {
    Generic,
    Specialized { values: Vec<LaurentPoly>, approach: Vec<i32> },
}

impl EquivariantValues {
    /// Specialization approached by deforming every ratio `a_{i+1}/a_i` by the same `u`.
    pub fn on_locus(values: Vec<LaurentPoly>) -> Self {
        let approach = (0..values.len() as i32).collect();
        EquivariantValues::Specialized { values, approach }
    }
}

fn x_values(n: usize, values: &EquivariantValues, reg: &Registry) -> Result<(Vec<LaurentPoly>, Vec<i32>)> {
    match values {
        EquivariantValues::Generic => Ok((
            a_names(n).iter().map(|a| Ok(LaurentPoly::var(reg, a)?)).collect::<Result<_>>()?,
            vec![0; n],
        )),
        EquivariantValues::Specialized { values, approach } => {
            if values.len() != n || approach.len() != n {
                return Err(Error::Invalid(format!("need {n} equivariant values")));
            }
            Ok((values.iter().map(|x| Ok(x.to_registry(reg)?)).collect::<Result<_>>()?, approach.clone()))
        }
    }
}

/// The summand for degrees `d[i][j]` (`i = 0..n-2`, `j = 0..=i`), including `(q/h)^{d_i}`.
pub fn vertex_term(fp: &FlagFixedPoint, d: &[Vec<i32>], values: &EquivariantValues) -> Result<Option<RationalFunction>> {
    let n = fp.n();
    let reg = vertex_registry(n);
    let (a, w) = x_values(n, values, &reg)?;
    let q = LaurentPoly::var(&reg, "q")?;
    let h = LaurentPoly::var(&reg, "h")?;
    let x = |i: usize, j: usize| -> &LaurentPoly { &a[fp.subset(i)[j]] };
    let order = |i: usize, j: usize, k: usize, l: usize| -> i32 { w[fp.subset(k)[l]] - w[fp.subset(i)[j]] };
    let deg = |i: usize, j: usize| -> i32 {
        if i + 1 == n {
            0
        } else {
            d[i][j]
        }
    };
    let ratio = |num: &LaurentPoly, den: &LaurentPoly| -> Result<LaurentPoly> {
        num.exact_div(den).ok_or_else(|| Error::Invalid("equivariant values must be monomials".into()))
    };
    let mut f = FactorProduct::new(&reg);
    for i in 0..n - 1 {
        let di: i32 = d[i].iter().sum();
        let qh = ratio(&q, &h)?;
        if di >= 0 {
            f.multiply(&qh.pow(di as u32));
        } else {
            f.multiply(&ratio(&LaurentPoly::one(&reg), &qh.pow((-di) as u32))?);
        }
        for j in 0..=i {
            for k in 0..=i {
                let m = deg(i, j) - deg(i, k);
                let r = ratio(x(i, j), x(i, k))?;
                let o = order(i, k, i, j);
                f.pochhammer(&(&q * &r), &q, m, true, o);
                f.pochhammer(&(&h * &r), &q, m, false, o);
            }
            for k in 0..=i + 1 {
                let m = deg(i, j) - deg(i + 1, k);
                let r = ratio(x(i + 1, k), x(i, j))?;
                let o = order(i, j, i + 1, k);
                f.pochhammer(&(&h * &r), &q, m, true, o);
                f.pochhammer(&(&q * &r), &q, m, false, o);
            }
        }
    }
    f.finish(|| format!("fixed point {fp}, degrees {d:?}"))
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<i32>> {
    if parts == 1 {
        return vec![vec![total as i32]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first as i32);
                rest
            })
        })
        .collect()
}

fn node_degrees(caps: &[u32]) -> Vec<Vec<u32>> {
    caps.iter().fold(vec![vec![]], |acc, &c| {
        acc.into_iter()
            .flat_map(|pre| {
                (0..=c).map(move |v| {
                    let mut p = pre.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

/// A vertex series at a fixed point.
#[derive(Clone, Debug)]
pub struct VertexSeries {
    pub fixed_point: FlagFixedPoint,
    pub series: TruncatedSeries,
}

impl VertexSeries {
    pub fn n(&self) -> usize {
        self.fixed_point.n()
    }

    pub fn coeff(&self, deg: &[u32]) -> RationalFunction {
        self.series.coeff(deg)
    }

    /// Nonzero coefficients with some node degree above `bound`.
    pub fn beyond(&self, bound: &[u32]) -> Vec<Vec<u32>> {
        self.series
            .terms()
            .filter(|(d, _)| d.iter().zip(bound).any(|(a, b)| a > b))
            .map(|(d, _)| d.clone())
            .collect()
    }
}

/// Sums the vertex summands over `d_{i,j} >= 0` with node degrees `d_i <= caps[i]`.
/// Coefficient of `z^d` for node degrees `d_i = sum_j d_{i,j}`.
pub fn vertex_coefficient(fp: &FlagFixedPoint, node: &[u32], values: &EquivariantValues) -> Result<RationalFunction> {
    let splits: Vec<Vec<Vec<i32>>> = node.iter().enumerate().fold(vec![vec![]], |acc, (i, &di)| {
        acc.into_iter()
            .flat_map(|pre: Vec<Vec<i32>>| {
                compositions(di, i + 1).into_iter().map(move |c| {
                    let mut p = pre.clone();
                    p.push(c);
                    p
                })
            })
            .collect()
    });
    let mut acc = RationalFunction::zero(&vertex_registry(fp.n()));
    for d in &splits {
        if let Some(t) = vertex_term(fp, d, values)? {
            acc = &acc + &t;
        }
    }
    Ok(acc)
}

pub fn vertex_coefficients_at(fp: &FlagFixedPoint, caps: &[u32], values: &EquivariantValues) -> Result<VertexSeries> {
    let n = fp.n();
    if caps.len() + 1 != n {
        return Err(Error::Invalid(format!("need {} caps", n.saturating_sub(1))));
    }
    let reg = vertex_registry(n);
    let degrees = node_degrees(caps);
    let coeffs: Vec<(Vec<u32>, RationalFunction)> = degrees
        .par_iter()
        .map(|node| Ok((node.clone(), vertex_coefficient(fp, node, values)?)))
        .collect::<Result<_>>()?;
    let mut series = TruncatedSeries::zero(&z_names(n), caps, &reg);
    for (d, c) in coeffs {
        series.insert(d, c);
    }
    Ok(VertexSeries {
        fixed_point: fp.clone(),
        series,
    })
}

/// Generic equivariant parameters.
pub fn vertex_coefficients(fp: &FlagFixedPoint, caps: &[u32]) -> Result<VertexSeries> {
    vertex_coefficients_at(fp, caps, &EquivariantValues::Generic)
}

/// Node degrees of the top term of the truncated series: `d_i = sum_{j<=i} (lambda_j - lambda_{n+1-j})`.
pub fn degree_bound(lambda: &Partition) -> Vec<u32> {
    let l = lambda.parts();
    let n = l.len();
    (1..n)
        .map(|i| (0..i).map(|j| l[j] as i64 - l[n - 1 - j] as i64).sum::<i64>() as u32)
        .collect()
}

/// `sum_d c_d xi^{reverse(lambda)} prod (xi_i/xi_{i+1})^{d_i}` as a function of `xi`, `q`, `h`.
pub fn series_to_xi(series: &TruncatedSeries, lambda: &Partition) -> Result<RationalFunction> {
    let n = lambda.n();
    let reg = macdonald_registry(n).union(series.registry());
    let mut out = RationalFunction::zero(&reg);
    for (d, c) in series.terms() {
        let mut e = vec![0i32; reg.len()];
        for k in 0..n {
            let up = if k < n - 1 { d[k] as i32 } else { 0 };
            let down = if k > 0 { d[k - 1] as i32 } else { 0 };
            e[k] = lambda.parts()[n - 1 - k] as i32 + up - down;
        }
        let m = RationalFunction::from(LaurentPoly::monomial(&reg, e.into(), Rational::one()));
        out = &out + &(&m * &c.to_registry(&reg)?);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub enum CandidateOutcome {
    /// The series has terms beyond the degree bound (listed).
    NoTermination(Vec<Vec<u32>>),
    /// A summand hit an unmatched pole or a 0/0.
    Failed(Error),
    /// Terminates; `polynomial` is `None` when the result is not symmetric.
    Terminates {
        polynomial: Option<SymmetricPolynomial>,
        constant: Option<RationalFunction>,
        matches_oracle: bool,
    },
}

#[derive(Clone, Debug)]
pub struct TruncationCandidate {
    pub fixed_point: FlagFixedPoint,
    pub outcome: CandidateOutcome,
}

impl TruncationCandidate {
    pub fn matches(&self) -> bool {
        matches!(self.outcome, CandidateOutcome::Terminates { matches_oracle: true, .. })
    }

    pub fn terminates(&self) -> bool {
        matches!(self.outcome, CandidateOutcome::Terminates { .. })
    }

    pub fn symmetric(&self) -> bool {
        matches!(self.outcome, CandidateOutcome::Terminates { polynomial: Some(_), .. })
    }
}

/// Evaluates the vertex on the truncation locus at every fixed point.
pub fn truncation_candidates(lambda: &Partition, n: usize, cap: u32, convention: LocusConvention) -> Result<Vec<TruncationCandidate>> {
    truncation_candidates_along(lambda, n, cap, convention, (0..n as i32).collect())
}

/// Same as [`truncation_candidates`] with an explicit approach direction.
///
/// Degrees are visited by increasing total degree and the scan of a fixed
/// point stops at the first pole or the first nonzero coefficient past the bound.
pub fn truncation_candidates_along(
    lambda: &Partition,
    n: usize,
    cap: u32,
    convention: LocusConvention,
    approach: Vec<i32>,
) -> Result<Vec<TruncationCandidate>> {
    let lambda = Partition::padded(lambda.parts(), n)?;
    let bound = degree_bound(&lambda);
    let caps: Vec<u32> = bound.iter().map(|&b| cap.max(b + 1)).collect();
    let mut degrees = node_degrees(&caps);
    degrees.sort_by_key(|d| (d.iter().sum::<u32>(), d.clone()));
    let values = EquivariantValues::Specialized {
        values: locus_point(&lambda, convention),
        approach,
    };
    let oracle = macdonald_oracle(&lambda, n)?;
    let reg = vertex_registry(n);
    FlagFixedPoint::all(n)
        .into_par_iter()
        .map(|fp| {
            let mut series = TruncatedSeries::zero(&z_names(n), &caps, &reg);
            let mut failure = None;
            for d in &degrees {
                let c = match vertex_coefficient(&fp, d, &values) {
                    Ok(c) => c,
                    Err(e @ (Error::Pole(_) | Error::Indeterminate(_))) => {
                        failure = Some(CandidateOutcome::Failed(e));
                        break;
                    }
                    Err(e) => return Err(e),
                };
                if c.is_zero() {
                    continue;
                }
                if d.iter().zip(&bound).any(|(x, b)| x > b) {
                    failure = Some(CandidateOutcome::NoTermination(vec![d.clone()]));
                    break;
                }
                series.insert(d.clone(), c);
            }
            let outcome = match failure {
                Some(f) => f,
                None => {
                    let f = series_to_xi(&series, &lambda)?;
                    match SymmetricPolynomial::from_rational_function(&f, n) {
                        Err(_) => CandidateOutcome::Terminates {
                            polynomial: None,
                            constant: None,
                            matches_oracle: false,
                        },
                        Ok(p) => {
                            let (constant, matches_oracle) = match p.coeff(&lambda) {
                                Some(top) => {
                                    let c = top.inv()?;
                                    let m = p.scale(&c) == oracle;
                                    (Some(c), m)
                                }
                                None => (None, false),
                            };
                            CandidateOutcome::Terminates {
                                polynomial: Some(p),
                                constant,
                                matches_oracle,
                            }
                        }
                    }
                }
            };
            Ok(TruncationCandidate { fixed_point: fp, outcome })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct TruncationReport {
    pub lambda: Partition,
    pub n: usize,
    pub convention: LocusConvention,
    pub degree_bound: Vec<u32>,
    pub fixed_point: FlagFixedPoint,
    pub polynomial: SymmetricPolynomial,
    /// `P_lambda = constant * (terminated series)`.
    pub constant: RationalFunction,
    pub symmetric: bool,
    pub matches_oracle: bool,
    pub candidates: Vec<TruncationCandidate>,
}

/// Picks the fixed point whose series terminates on the truncation locus
/// (preferring one that matches the oracle) and reports the comparison.
pub fn truncation_check(lambda: &Partition, n: usize, cap: u32, convention: LocusConvention) -> Result<TruncationReport> {
    let lambda_n = Partition::padded(lambda.parts(), n)?;
    if cap < lambda_n.size() {
        return Err(Error::Invalid(format!("cap {cap} is below |lambda| = {}", lambda_n.size())));
    }
    let candidates = truncation_candidates(&lambda_n, n, cap, convention)?;
    let pick = candidates
        .iter()
        .find(|c| c.matches())
        .or_else(|| candidates.iter().find(|c| c.symmetric()))
        .or_else(|| candidates.iter().find(|c| c.terminates()))
        .ok_or_else(|| Error::NoTerminatingFixedPoint(format!("{lambda_n} ({convention:?})")))?
        .clone();
    let (polynomial, constant, matches_oracle, symmetric) = match &pick.outcome {
        CandidateOutcome::Terminates {
            polynomial: Some(p),
            constant,
            matches_oracle,
        } => (
            p.clone(),
            constant.clone().unwrap_or_else(|| RationalFunction::zero(p.registry())),
            *matches_oracle,
            true,
        ),
        _ => {
            let reg = macdonald_registry(n);
            (SymmetricPolynomial::zero(n, &reg), RationalFunction::zero(&reg), false, false)
        }
    };
    Ok(TruncationReport {
        lambda: lambda_n,
        n,
        convention,
        degree_bound: degree_bound(&Partition::padded(lambda.parts(), n)?),
        fixed_point: pick.fixed_point,
        polynomial,
        constant,
        symmetric,
        matches_oracle,
        candidates,
    })
}

#[derive(Clone, Debug)]
pub struct ConventionResolution {
    /// Every (direction, fixed point) whose series terminates and matches `P_(1,0)`.
    pub matches: Vec<(LocusConvention, FlagFixedPoint)>,
    pub tried: usize,
}

impl ConventionResolution {
    pub fn unique(&self) -> Option<&(LocusConvention, FlagFixedPoint)> {
        if self.matches.len() == 1 {
            self.matches.first()
        } else {
            None
        }
    }
}

/// Runs `lambda = (1,0)`, `n = 2` over both locus directions and both fixed points.
pub fn resolve_conventions() -> Result<ConventionResolution> {
    let lambda = Partition::new(&[1, 0])?;
    let mut matches = vec![];
    let mut tried = 0;
    for conv in [LocusConvention::Paper, LocusConvention::HbarInverted] {
        for c in truncation_candidates(&lambda, 2, 2, conv)? {
            tried += 1;
            if c.matches() {
                matches.push((conv, c.fixed_point));
            }
        }
    }
    Ok(ConventionResolution { matches, tried })
}

// ------------------------------------------------------------ eigen residual

/// Pochhammer-ratio part of the prefactor,
/// `prod_{(i,j)} [(q a_j/a_i; q)_inf / (q a_j/(h a_i); q)_inf]^power` over `i < j`
/// (or `i > j` when `reversed`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PochhammerPrefactor {
    pub power: i32,
    pub reversed: bool,
}

impl PochhammerPrefactor {
    pub fn candidates() -> Vec<Self> {
        let mut v = vec![PochhammerPrefactor { power: 0, reversed: false }];
        for power in [1, -1] {
            for reversed in [false, true] {
                v.push(PochhammerPrefactor { power, reversed });
            }
        }
        v
    }

    /// `Phi(shifted a) / Phi(a)` for the shift `a_i -> q^{eps_i} a_i`.
    pub fn shift_ratio(&self, reg: &Registry, n: usize, eps: &[i32]) -> Result<RationalFunction> {
        let mut out = RationalFunction::one(reg);
        if self.power == 0 {
            return Ok(out);
        }
        let names = a_names(n);
        let q = RationalFunction::var(reg, "q")?;
        let h = RationalFunction::var(reg, "h")?;
        for i in 0..n {
            for j in 0..n {
                if (i < j) == self.reversed || i == j {
                    continue;
                }
                let m = eps[j] - eps[i];
                if m == 0 {
                    continue;
                }
                let x = &q * &RationalFunction::var(reg, &names[j])?.checked_div(&RationalFunction::var(reg, &names[i])?)?;
                let y = x.checked_div(&h)?;
                let r = q_pochhammer(&y, "q", m)?.checked_div(&q_pochhammer(&x, "q", m)?)?;
                out = &out * &r.pow(self.power)?;
            }
        }
        Ok(out)
    }
}

/// Prefactor class: under `p_i` it picks up `c_i xi_{sigma(i)}` (electric) or
/// `c_i a_{sigma(i)}` (magnetic), times the Pochhammer ratio (electric only).
#[derive(Clone, Debug)]
pub struct PrefactorFit {
    pub sigma: Vec<usize>,
    pub pochhammer: PochhammerPrefactor,
    /// Fitted constants `c_i`.
    pub multipliers: Vec<RationalFunction>,
    /// Fitted eigenvalue constants `kappa_r`, `r = 1..n`.
    pub kappas: Vec<RationalFunction>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenFrame {
    Electric,
    Magnetic,
}

#[derive(Clone, Debug)]
pub struct EigenResidualReport {
    pub frame: EigenFrame,
    pub n: usize,
    pub cap: u32,
    pub fixed_point: FlagFixedPoint,
    pub fit: Option<PrefactorFit>,
    /// `H_r V - kappa_r e_r V` per `r` (prefactor stripped).
    pub residuals: Vec<TruncatedSeries>,
    pub candidates_tried: usize,
    /// Why each rejected candidate failed.
    pub rejected: Vec<String>,
}

impl EigenResidualReport {
    pub fn vanishes(&self) -> bool {
        self.fit.is_some() && self.residuals.iter().all(|r| r.is_zero())
    }

    /// Lowest degree with a nonzero coefficient, per `r`.
    pub fn lowest_orders(&self) -> Vec<Option<Vec<u32>>> {
        self.residuals.iter().map(|r| r.lowest_degree()).collect()
    }
}

fn free_of(c: &RationalFunction, names: &[String]) -> bool {
    names.iter().all(|x| c.is_free_of(x))
}

/// `xi_k / xi_n = prod_{l >= k} z_l` as a degree vector (0-based `k`).
fn xi_degree(n: usize, k: usize) -> Vec<u32> {
    (0..n - 1).map(|l| u32::from(l >= k)).collect()
}

fn add_deg(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn solve_rf(mut m: Vec<Vec<RationalFunction>>, mut rhs: Vec<RationalFunction>) -> Result<Vec<RationalFunction>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::Invalid("singular prefactor system".into()))?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].checked_div(&m[col][col])?;
                for c in col..n {
                    let t = &f * &m[col][c];
                    m[r][c] = &m[r][c] - &t;
                }
                let t = &f * &rhs[col];
                rhs[r] = &rhs[r] - &t;
            }
        }
    }
    (0..n).map(|i| Ok(rhs[i].checked_div(&m[i][i])?)).collect()
}

struct ElectricData {
    n: usize,
    reg: Registry,
    v: TruncatedSeries,
    /// Per nonempty subset: shift vector, tRS coefficient, shifted vertex.
    shifts: BTreeMap<Vec<usize>, (Vec<i32>, RationalFunction, TruncatedSeries)>,
}

impl ElectricData {
    fn new(fp: &FlagFixedPoint, cap: u32) -> Result<Self> {
        let n = fp.n();
        let caps = vec![cap; n - 1];
        let v = vertex_coefficients(fp, &caps)?.series;
        let reg = vertex_registry(n);
        let names = a_names(n);
        let frame = TrsFrame::generic(n, "a", "h");
        let mut shifts = BTreeMap::new();
        for r in 1..=n {
            let h = trs_hamiltonian(&frame, r)?;
            for s in subsets(n, r) {
                let eps: Vec<i32> = (0..n).map(|i| i32::from(s.contains(&i))).collect();
                let coeff = h
                    .coeff(&eps)
                    .cloned()
                    .ok_or_else(|| Error::Invalid("missing Hamiltonian term".into()))?
                    .to_registry(&reg)?;
                let map = shift_map(&reg, &names, "q", &eps)?;
                shifts.insert(s, (eps, coeff, v.map_monomials(&map)?));
            }
        }
        Ok(ElectricData { n, reg, v, shifts })
    }

    /// `sum_{|I|=r} prod c_i * R_I * z^{deg} * V_I` with the prefactor ratio folded in.
    fn lhs(&self, r: usize, sigma: &[usize], phi: PochhammerPrefactor, c: &[RationalFunction]) -> Result<TruncatedSeries> {
        let mut acc = self.v.zero_like();
        for s in subsets(self.n, r) {
            let (eps, coeff, vi) = &self.shifts[&s];
            let mut k = &(coeff * &phi.shift_ratio(&self.reg, self.n, eps)?) * &RationalFunction::one(&self.reg);
            let mut deg = vec![0u32; self.n - 1];
            for &i in &s {
                k = &k * &c[i];
                deg = add_deg(&deg, &xi_degree(self.n, sigma[i]));
            }
            acc = acc.try_add(&vi.scale(&k).shift_degree(&deg))?;
        }
        Ok(acc)
    }

    /// `e_r(xi)/xi_n^r * V`.
    fn rhs(&self, r: usize) -> Result<TruncatedSeries> {
        let mut e = self.v.zero_like();
        for s in subsets(self.n, r) {
            let deg = s.iter().fold(vec![0u32; self.n - 1], |d, &k| add_deg(&d, &xi_degree(self.n, k)));
            e = e.try_add(&self.v.monomial_like(deg, RationalFunction::one(&self.reg)))?;
        }
        Ok(e.try_mul(&self.v)?)
    }

    fn fit(&self, sigma: &[usize], phi: PochhammerPrefactor) -> std::result::Result<(PrefactorFit, Vec<TruncatedSeries>), String> {
        let n = self.n;
        let names = a_names(n);
        let err = |e: Error| e.to_string();
        // H_1 at the degrees of xi_k/xi_n fixes c_1..c_n (kappa_1 = 1)
        let rhs1 = self.rhs(1).map_err(err)?;
        let mut rows = vec![];
        let mut b = vec![];
        for k in 0..n {
            let target = xi_degree(n, k);
            let mut row = vec![];
            for i in 0..n {
                let (eps, coeff, vi) = &self.shifts[&vec![i]];
                let ratio = phi.shift_ratio(&self.reg, n, eps).map_err(err)?;
                let own = xi_degree(n, sigma[i]);
                let entry = if target.iter().zip(&own).all(|(t, o)| t >= o) {
                    let rest: Vec<u32> = target.iter().zip(&own).map(|(t, o)| t - o).collect();
                    &(coeff * &ratio) * &vi.coeff(&rest)
                } else {
                    RationalFunction::zero(&self.reg)
                };
                row.push(entry);
            }
            rows.push(row);
            b.push(rhs1.coeff(&target));
        }
        let c = solve_rf(rows, b).map_err(err)?;
        if let Some((i, ci)) = c.iter().enumerate().find(|(_, ci)| !free_of(ci, &names)) {
            return Err(format!("multiplier c_{} = {ci} depends on a", i + 1));
        }
        let mut kappas = vec![];
        let mut residuals = vec![];
        for r in 1..=n {
            let lhs = self.lhs(r, sigma, phi, &c).map_err(err)?;
            let rhs = self.rhs(r).map_err(err)?;
            let low: Vec<u32> = ((n - r)..n).fold(vec![0u32; n - 1], |d, k| add_deg(&d, &xi_degree(n, k)));
            let kappa = lhs.coeff(&low).checked_div(&rhs.coeff(&low)).map_err(|e| e.to_string())?;
            if !free_of(&kappa, &names) {
                return Err(format!("kappa_{r} = {kappa} depends on a"));
            }
            residuals.push(lhs.try_add(&rhs.scale(&-&kappa)).map_err(|e| e.to_string())?);
            kappas.push(kappa);
        }
        Ok((
            PrefactorFit {
                sigma: sigma.to_vec(),
                pochhammer: phi,
                multipliers: c,
                kappas,
            },
            residuals,
        ))
    }
}

/// Fits the prefactor class against the electric Hamiltonians `H_r(a)` at
/// coupling `h` and returns the residual series through `cap`.
pub fn eigen_residual(n: usize, cap: u32) -> Result<EigenResidualReport> {
    eigen_residual_at(&FlagFixedPoint::identity(n), cap)
}

pub fn eigen_residual_at(fp: &FlagFixedPoint, cap: u32) -> Result<EigenResidualReport> {
    let n = fp.n();
    if n < 2 || cap < 1 {
        return Err(Error::Invalid("need n >= 2 and cap >= 1".into()));
    }
    let data = ElectricData::new(fp, cap)?;
    let mut rejected = vec![];
    let mut best: Option<(PrefactorFit, Vec<TruncatedSeries>)> = None;
    let mut tried = 0;
    'outer: for sigma in permutations(n) {
        for phi in PochhammerPrefactor::candidates() {
            tried += 1;
            match data.fit(&sigma, phi) {
                Ok((fit, res)) => {
                    let zero = res.iter().all(|r| r.is_zero());
                    if zero {
                        best = Some((fit, res));
                        break 'outer;
                    }
                    let orders: Vec<_> = res.iter().map(|r| r.lowest_degree()).collect();
                    rejected.push(format!("sigma {sigma:?}, {phi:?}: residual orders {orders:?}"));
                    if best.is_none() {
                        best = Some((fit, res));
                    }
                }
                Err(e) => rejected.push(format!("sigma {sigma:?}, {phi:?}: {e}")),
            }
        }
    }
    let (fit, residuals) = match best {
        Some((f, r)) => (Some(f), r),
        None => (None, vec![]),
    };
    Ok(EigenResidualReport {
        frame: EigenFrame::Electric,
        n,
        cap,
        fixed_point: fp.clone(),
        fit,
        residuals,
        candidates_tried: tried,
        rejected,
    })
}

/// `(h xi_i - xi_j)/(xi_i - xi_j)` expanded in `z` (0-based `i != j`).
fn magnetic_factor(like: &TruncatedSeries, reg: &Registry, n: usize, i: usize, j: usize) -> Result<TruncatedSeries> {
    let (lo, hi) = (i.min(j), i.max(j));
    let w: Vec<u32> = (0..n - 1).map(|l| u32::from(l >= lo && l < hi)).collect();
    let h = RationalFunction::var(reg, "h")?;
    let one = RationalFunction::one(reg);
    // i < j: (1 - h w)/(1 - w) = 1 + (1 - h) sum w^k ; i > j: h + (h - 1) sum w^k
    let (c0, ck) = if i < j { (one.clone(), &one - &h) } else { (h.clone(), &h - &one) };
    let mut s = like.constant_like(c0);
    let mut deg = w.clone();
    while deg.iter().zip(like.caps()).all(|(d, c)| d <= c) && deg.iter().any(|&d| d > 0) {
        s.insert(deg.clone(), ck.clone());
        deg = add_deg(&deg, &w);
    }
    Ok(s)
}

/// The magnetic counterpart: shifts `xi_i -> q xi_i` acting through `z`,
/// eigenvalues `kappa_r e_r(a)`, prefactor multipliers `c_i a_{sigma(i)}`.
/// No Pochhammer factors in `xi` are tried; the outcome is reported either way.
pub fn magnetic_eigen_residual(fp: &FlagFixedPoint, cap: u32) -> Result<EigenResidualReport> {
    let n = fp.n();
    if n < 2 || cap < 1 {
        return Err(Error::Invalid("need n >= 2 and cap >= 1".into()));
    }
    let caps = vec![cap; n - 1];
    let v = vertex_coefficients(fp, &caps)?.series;
    let reg = vertex_registry(n);
    let names = a_names(n);
    let avars: Vec<RationalFunction> = names.iter().map(|a| RationalFunction::var(&reg, a)).collect::<std::result::Result<_, _>>()?;
    let q = RationalFunction::var(&reg, "q")?;
    // shifting xi by eps multiplies z^d by q^{sum_l d_l (eps_l - eps_{l+1})}
    let shifted = |eps: &[i32]| -> Result<TruncatedSeries> {
        let mut out = v.zero_like();
        for (d, c) in v.terms() {
            let e: i32 = (0..n - 1).map(|l| d[l] as i32 * (eps[l] - eps[l + 1])).sum();
            out.insert(d.clone(), c * &q.pow(e)?);
        }
        Ok(out)
    };
    let mut rejected = vec![];
    let mut best = None;
    let mut tried = 0;
    for sigma in permutations(n) {
        tried += 1;
        let mut kappas = vec![];
        let mut residuals = vec![];
        // c_i h^{i-1} = 1 from the z^0 part of H_1
        let h = RationalFunction::var(&reg, "h")?;
        let c: Vec<RationalFunction> = (0..n).map(|i| h.pow(-(i as i32))).collect::<std::result::Result<_, _>>()?;
        for r in 1..=n {
            let mut lhs = v.zero_like();
            let mut er = RationalFunction::zero(&reg);
            for s in subsets(n, r) {
                let eps: Vec<i32> = (0..n).map(|i| i32::from(s.contains(&i))).collect();
                let mut term = shifted(&eps)?;
                let mut k = RationalFunction::one(&reg);
                for &i in &s {
                    k = &(&k * &c[i]) * &avars[sigma[i]];
                    for j in (0..n).filter(|j| !s.contains(j)) {
                        term = term.try_mul(&magnetic_factor(&v, &reg, n, i, j)?)?;
                    }
                }
                lhs = lhs.try_add(&term.scale(&k))?;
                er = &er + &s.iter().fold(RationalFunction::one(&reg), |acc, &i| &acc * &avars[i]);
            }
            let kappa = lhs.constant_term().checked_div(&er)?;
            if !free_of(&kappa, &names) {
                rejected.push(format!("sigma {sigma:?}: kappa_{r} depends on a"));
            }
            residuals.push(lhs.try_add(&v.scale(&-&(&kappa * &er)))?);
            kappas.push(kappa);
        }
        let zero = residuals.iter().all(|r: &TruncatedSeries| r.is_zero());
        let fit = PrefactorFit {
            sigma: sigma.clone(),
            pochhammer: PochhammerPrefactor { power: 0, reversed: false },
            multipliers: c,
            kappas,
        };
        if zero {
            best = Some((fit, residuals));
            break;
        }
        rejected.push(format!(
            "sigma {sigma:?}: residual orders {:?}",
            residuals.iter().map(|r| r.lowest_degree()).collect::<Vec<_>>()
        ));
        if best.is_none() {
            best = Some((fit, residuals));
        }
    }
    let (fit, residuals) = match best {
        Some((f, r)) => (Some(f), r),
        None => (None, vec![]),
    };
    Ok(EigenResidualReport {
        frame: EigenFrame::Magnetic,
        n,
        cap,
        fixed_point: fp.clone(),
        fit,
        residuals,
        candidates_tried: tried,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qoper_algebra::parse_rational_function;

    #[test]
    fn fixed_points() {
        assert_eq!(FlagFixedPoint::all(3).len(), 6);
        assert_eq!(FlagFixedPoint::identity(2).to_string(), "({1},{1,2})");
        assert!(FlagFixedPoint::new(vec![vec![0], vec![1, 2], vec![0, 1, 2]]).is_err());
    }

    #[test]
    fn zero_caps_give_one() {
        for fp in FlagFixedPoint::all(3) {
            let v = vertex_coefficients(&fp, &[0, 0]).unwrap();
            assert!(v.series.as_constant().unwrap().is_one());
        }
    }

    #[test]
    fn n2_coefficient() {
        let fp = FlagFixedPoint::identity(2);
        let v = vertex_coefficients(&fp, &[2]).unwrap();
        let reg = vertex_registry(2);
        let c1 = parse_rational_function(&reg, "(q/h)*(1-h)*(1-h*a2/a1)/((1-q)*(1-q*a2/a1))").unwrap();
        assert_eq!(v.coeff(&[1]), c1);
    }

    #[test]
    fn bounds() {
        let l = Partition::new(&[2, 1, 0]).unwrap();
        assert_eq!(degree_bound(&l), vec![2, 2]);
        assert_eq!(degree_bound(&Partition::new(&[1, 0]).unwrap()), vec![1]);
    }
}
