//! The elliptic tier: the DELL current and Hamiltonians as shift operators
//! with `(p, w)`-series coefficients, eRS Hamiltonians, and the chain
//! DELL -> eRS -> tRS.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use qoper_algebra::{theta_expand, theta_expand_without_inverse, LaurentPoly, Rational, RationalFunction, Registry, ShiftOperator, TruncatedSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::trs::{trs_hamiltonian, TrsFrame};

pub type SeriesOperator = ShiftOperator<TruncatedSeries>;

/// Which theta function enters the current.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaVariant {
    /// `prod_k (1 - x p^k)(1 - p^{k+1}/x)`.
    Full,
    /// Drops the `(1 - p^{k+1}/x)` factors. Used as a negative control.
    Corrupted,
}

#[derive(Clone, Debug)]
pub struct DellModel {
    pub n: usize,
    pub p_cap: u32,
    pub w_cap: u32,
    /// Modes `-M..=M` of the current are built.
    pub mode_range: u32,
    pub theta: ThetaVariant,
}

/// `sum_i n_i (n_i - 1) / 2`.
pub fn w_weight(shift: &[i32]) -> u32 {
    shift.iter().map(|&k| (k * (k - 1) / 2) as u32).sum()
}

impl DellModel {
    pub fn new(n: usize, p_cap: u32, w_cap: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid("the DELL model needs N >= 2".into()));
        }
        let mut m = DellModel {
            n,
            p_cap,
            w_cap,
            mode_range: 0,
            theta: ThetaVariant::Full,
        };
        m.mode_range = m.default_mode_range();
        Ok(m)
    }

    pub fn with_theta(mut self, theta: ThetaVariant) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_mode_range(mut self, m: u32) -> Self {
        self.mode_range = m;
        self
    }

    pub fn coords(&self) -> Vec<String> {
        (1..=self.n).map(|i| format!("x{i}")).collect()
    }

    pub fn registry(&self) -> Registry {
        let mut names = self.coords();
        names.push("q".into());
        names.push("h".into());
        Registry::new(&names)
    }

    pub fn small(&self) -> [&'static str; 2] {
        ["p", "w"]
    }

    pub fn caps(&self) -> [u32; 2] {
        [self.p_cap, self.w_cap]
    }

    /// Range of a single `n_i` with `n_i (n_i - 1)/2 <= W`.
    pub fn shift_window(&self) -> (i32, i32) {
        let mut hi = 1;
        while ((hi + 1) * hi / 2) as u32 <= self.w_cap {
            hi += 1;
        }
        (1 - hi, hi)
    }

    /// `N * max |n_i|`.
    pub fn default_mode_range(&self) -> u32 {
        let (lo, hi) = self.shift_window();
        self.n as u32 * lo.unsigned_abs().max(hi.unsigned_abs())
    }

    /// Shift vectors of mode `mode` within the w-weight bound.
    pub fn shift_vectors(&self, mode: i32) -> Vec<Vec<i32>> {
        let (lo, hi) = self.shift_window();
        let mut out = vec![];
        let mut cur = vec![];
        fn rec(n: usize, lo: i32, hi: i32, left: i32, budget: u32, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
            if cur.len() == n {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            for k in lo..=hi {
                let w = (k * (k - 1) / 2) as u32;
                if w > budget {
                    continue;
                }
                cur.push(k);
                rec(n, lo, hi, left - k, budget - w, cur, out);
                cur.pop();
            }
        }
        rec(self.n, lo, hi, mode, self.w_cap, &mut cur, &mut out);
        out
    }

    fn theta(&self, x: &RationalFunction) -> Result<TruncatedSeries> {
        let s = match self.theta {
            ThetaVariant::Full => theta_expand(x, "p", self.p_cap)?,
            ThetaVariant::Corrupted => theta_expand_without_inverse(x, "p", self.p_cap)?,
        };
        Ok(s.embed(&self.small(), &self.caps())?)
    }
}

struct ThetaCache<'a> {
    model: &'a DellModel,
    reg: Registry,
    memo: HashMap<(usize, usize, i32), TruncatedSeries>,
}

impl<'a> ThetaCache<'a> {
    fn new(model: &'a DellModel) -> Self {
        ThetaCache {
            model,
            reg: model.registry(),
            memo: HashMap::new(),
        }
    }

    /// `theta_p(h^e x_i / x_j)`.
    fn get(&mut self, i: usize, j: usize, e: i32) -> Result<TruncatedSeries> {
        if let Some(s) = self.memo.get(&(i, j, e)) {
            return Ok(s.clone());
        }
        let x = (&RationalFunction::var(&self.reg, &format!("x{}", i + 1))? * &RationalFunction::var_pow(&self.reg, "h", e)?)
            .checked_div(&RationalFunction::var(&self.reg, &format!("x{}", j + 1))?)?;
        let s = self.model.theta(&x)?;
        self.memo.insert((i, j, e), s.clone());
        Ok(s)
    }
}

/// `(-1)^{sum n} w^{weight} prod_{i<j} theta_p(h^{n_i - n_j} x_i/x_j)`.
fn current_coefficient(model: &DellModel, cache: &mut ThetaCache, shift: &[i32]) -> Result<TruncatedSeries> {
    let reg = model.registry();
    let mut c = TruncatedSeries::one(&model.small(), &model.caps(), &reg);
    for i in 0..model.n {
        for j in i + 1..model.n {
            c = &c * &cache.get(i, j, shift[i] - shift[j])?;
        }
    }
    let mode: i32 = shift.iter().sum();
    if mode.rem_euclid(2) == 1 {
        c = -c;
    }
    Ok(c.shift_degree(&[0, w_weight(shift)]))
}

/// The mode `O_mode` of the current.
pub fn dell_mode(model: &DellModel, mode: i32) -> Result<SeriesOperator> {
    let coords = model.coords();
    let shifts = model.shift_vectors(mode);
    let terms: Vec<(Vec<i32>, TruncatedSeries)> = shifts
        .par_chunks(8)
        .map(|chunk| {
            let mut cache = ThetaCache::new(model);
            chunk
                .iter()
                .map(|s| Ok((s.clone(), current_coefficient(model, &mut cache, s)?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut op = ShiftOperator::zero(&coords, "q");
    for (s, c) in terms {
        op.add_term(s, c);
    }
    Ok(op)
}

#[derive(Clone, Debug)]
pub struct CurrentModes {
    pub model: DellModel,
    pub modes: BTreeMap<i32, SeriesOperator>,
    /// Set when `mode_range` is too small to hold every admissible shift vector.
    pub warnings: Vec<String>,
}

pub fn dell_current(model: &DellModel) -> Result<CurrentModes> {
    let m = model.mode_range as i32;
    let mut modes = BTreeMap::new();
    for k in -m..=m {
        modes.insert(k, dell_mode(model, k)?);
    }
    let mut warnings = vec![];
    let (lo, hi) = model.shift_window();
    let reach = (model.n as i32 * lo).abs().max(model.n as i32 * hi);
    if reach > m {
        let clipped: usize = (m + 1..=reach).map(|k| model.shift_vectors(k).len() + model.shift_vectors(-k).len()).sum();
        if clipped > 0 {
            warnings.push(format!("mode range {m} clips {clipped} admissible shift vectors (need {reach})"));
        }
    }
    Ok(CurrentModes {
        model: model.clone(),
        modes,
        warnings,
    })
}

/// `O_0^{-1}` within the caps: `O_0 = S + R` with `S` the shift-zero part, so
/// `O_0^{-1} = sum_k (-S^{-1} R)^k S^{-1}`, finite since `R` carries `w`.
pub fn invert_zero_mode(o0: &SeriesOperator) -> Result<SeriesOperator> {
    let zero = vec![0; o0.n()];
    let s = o0
        .coeff(&zero)
        .ok_or_else(|| Error::Invalid("O_0 has no shift-zero term".into()))?;
    let sinv = s.invert()?;
    let mut r = o0.zero_like();
    for (shift, c) in o0.terms() {
        if shift != &zero {
            r.add_term(shift.clone(), c.clone());
        }
    }
    let step = r.left_mul(&sinv).negate();
    let sinv_op = o0.term_like(zero, sinv);
    let mut acc = sinv_op.clone();
    let mut pow = sinv_op;
    loop {
        pow = step.compose(&pow)?;
        if pow.is_zero() {
            break;
        }
        acc = acc.try_add(&pow)?;
    }
    Ok(acc)
}

/// `H_a = O_0^{-1} O_a` for `a = 1..N-1`.
pub fn dell_hamiltonians(model: &DellModel) -> Result<Vec<SeriesOperator>> {
    let o0inv = invert_zero_mode(&dell_mode(model, 0)?)?;
    (1..model.n as i32)
        .map(|a| Ok(o0inv.compose(&dell_mode(model, a)?)?))
        .collect()
}

pub fn dell_hamiltonian(model: &DellModel, a: usize) -> Result<SeriesOperator> {
    if a == 0 || a >= model.n {
        return Err(Error::OutOfRange { k: a, n: model.n - 1 });
    }
    let o0inv = invert_zero_mode(&dell_mode(model, 0)?)?;
    Ok(o0inv.compose(&dell_mode(model, a as i32)?)?)
}

/// `(p, w)` orders carrying a nonzero coefficient, sorted by total degree.
pub fn nonzero_orders(op: &SeriesOperator) -> Vec<[u32; 2]> {
    let mut out: Vec<[u32; 2]> = op
        .terms()
        .flat_map(|(_, c)| c.terms().filter(|(_, x)| !x.is_zero()).map(|(d, _)| [d[0], d[1]]).collect::<Vec<_>>())
        .collect();
    out.sort_by_key(|d| (d[0] + d[1], d[1], d[0]));
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCertificate {
    pub a: usize,
    pub b: usize,
    /// Orders at which `[H_a, H_b]` does not vanish.
    pub failing_orders: Vec<[u32; 2]>,
}

impl PairCertificate {
    pub fn passed(&self) -> bool {
        self.failing_orders.is_empty()
    }

    pub fn first_failure(&self) -> Option<[u32; 2]> {
        self.failing_orders.first().copied()
    }
}

#[derive(Clone, Debug)]
pub struct CommutativityCertificate {
    pub n: usize,
    pub caps: [u32; 2],
    pub theta: ThetaVariant,
    pub pairs: Vec<PairCertificate>,
}

impl CommutativityCertificate {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(|p| p.passed())
    }

    pub fn first_failure(&self) -> Option<[u32; 2]> {
        self.pairs
            .iter()
            .filter_map(|p| p.first_failure())
            .min_by_key(|d| (d[0] + d[1], d[1], d[0]))
    }

    /// The largest box `p <= P', w <= W'` (inside the caps) free of failures.
    pub fn max_verified_order(&self) -> [u32; 2] {
        let fails: Vec<[u32; 2]> = self.pairs.iter().flat_map(|p| p.failing_orders.clone()).collect();
        let mut best = None;
        for pp in 0..=self.caps[0] {
            for ww in 0..=self.caps[1] {
                if fails.iter().any(|f| f[0] <= pp && f[1] <= ww) {
                    continue;
                }
                let key = (pp + ww, ww);
                if best.map_or(true, |(k, _)| key > k) {
                    best = Some((key, [pp, ww]));
                }
            }
        }
        best.map(|(_, b)| b).unwrap_or([0, 0])
    }
}

/// How the commutator is tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateMethod {
    /// Exact rational-function arithmetic throughout.
    Symbolic,
    /// Exact rational arithmetic at `points` random lattice orbits `x q^s`
    /// of random `(x, q, h)`; a nonzero value is a proof of failure, zeros at
    /// random points certify with probability one.
    Pointwise { points: usize, seed: u64 },
}

impl Default for CertificateMethod {
    fn default() -> Self {
        CertificateMethod::Pointwise { points: 3, seed: 0 }
    }
}

pub fn dell_commutativity_certificate(model: &DellModel) -> Result<CommutativityCertificate> {
    dell_commutativity_certificate_with(model, CertificateMethod::default())
}

pub fn dell_commutativity_certificate_with(model: &DellModel, method: CertificateMethod) -> Result<CommutativityCertificate> {
    let pairs: Vec<(usize, usize)> = (1..model.n).flat_map(|a| (a + 1..model.n).map(move |b| (a, b))).collect();
    let pairs = match method {
        CertificateMethod::Symbolic => {
            let hs = dell_hamiltonians(model)?;
            pairs
                .into_iter()
                .map(|(a, b)| {
                    let c = hs[a - 1].commutator(&hs[b - 1])?;
                    Ok(PairCertificate {
                        a,
                        b,
                        failing_orders: nonzero_orders(&c),
                    })
                })
                .collect::<Result<_>>()?
        }
        CertificateMethod::Pointwise { points, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut fails: Vec<Vec<[u32; 2]>> = vec![vec![]; pairs.len()];
            let mut done = 0;
            let mut attempts = 0;
            while done < points {
                attempts += 1;
                if attempts > 20 * points.max(1) {
                    return Err(Error::Invalid("could not find a regular evaluation point".into()));
                }
                let orbit = Orbit::random(model, &mut rng);
                let found: Option<Vec<Vec<[u32; 2]>>> = pairs
                    .par_iter()
                    .map(|&(a, b)| orbit.commutator_orders(a, b))
                    .collect();
                let Some(found) = found else { continue };
                for (acc, f) in fails.iter_mut().zip(found) {
                    acc.extend(f);
                }
                done += 1;
            }
            pairs
                .into_iter()
                .zip(fails)
                .map(|((a, b), mut f)| {
                    f.sort_by_key(|d| (d[0] + d[1], d[1], d[0]));
                    f.dedup();
                    PairCertificate { a, b, failing_orders: f }
                })
                .collect()
        }
    };
    Ok(CommutativityCertificate {
        n: model.n,
        caps: model.caps(),
        theta: model.theta,
        pairs,
    })
}

/// Dense `(p, w)`-series with rational coefficients.
#[derive(Clone, Debug, PartialEq)]
struct NumSeries {
    caps: [u32; 2],
    c: Vec<Rational>,
}

impl NumSeries {
    fn zero(caps: [u32; 2]) -> Self {
        NumSeries {
            caps,
            c: vec![Rational::zero(); ((caps[0] + 1) * (caps[1] + 1)) as usize],
        }
    }

    fn constant(caps: [u32; 2], v: Rational) -> Self {
        let mut s = Self::zero(caps);
        s.c[0] = v;
        s
    }

    fn idx(&self, p: u32, w: u32) -> usize {
        (p * (self.caps[1] + 1) + w) as usize
    }

    fn add_at(&mut self, p: u32, w: u32, v: &Rational) {
        if p <= self.caps[0] && w <= self.caps[1] {
            let i = self.idx(p, w);
            self.c[i] += v;
        }
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    fn nonzero_orders(&self) -> Vec<[u32; 2]> {
        let mut out = vec![];
        for p in 0..=self.caps[0] {
            for w in 0..=self.caps[1] {
                if !self.c[self.idx(p, w)].is_zero() {
                    out.push([p, w]);
                }
            }
        }
        out
    }

    fn add(&mut self, o: &Self) {
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            *a += b;
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.caps);
        for p1 in 0..=self.caps[0] {
            for w1 in 0..=self.caps[1] {
                let a = &self.c[self.idx(p1, w1)];
                if a.is_zero() {
                    continue;
                }
                for p2 in 0..=self.caps[0] - p1 {
                    for w2 in 0..=self.caps[1] - w1 {
                        let b = &o.c[o.idx(p2, w2)];
                        if !b.is_zero() {
                            out.add_at(p1 + p2, w1 + w2, &(a * b));
                        }
                    }
                }
            }
        }
        out
    }

    fn neg(&self) -> Self {
        NumSeries {
            caps: self.caps,
            c: self.c.iter().map(|x| -x).collect(),
        }
    }

    fn invert(&self) -> Option<Self> {
        if self.c[0].is_zero() {
            return None;
        }
        let c0inv = self.c[0].recip();
        let mut e = self.neg();
        e.c[0] = Rational::zero();
        for x in e.c.iter_mut() {
            *x *= &c0inv;
        }
        let mut acc = Self::constant(self.caps, Rational::one());
        let mut pow = acc.clone();
        for _ in 0..self.caps[0] + self.caps[1] {
            pow = pow.mul(&e);
            acc.add(&pow);
        }
        for x in acc.c.iter_mut() {
            *x *= &c0inv;
        }
        Some(acc)
    }
}

type NumOp = BTreeMap<Vec<i32>, NumSeries>;

/// Numeric evaluation of the DELL operators on the orbit `x_i q^{s_i}`.
struct Orbit<'a> {
    model: &'a DellModel,
    x: Vec<Rational>,
    q: Rational,
    h: Rational,
    memo: std::sync::Mutex<HashMap<(u8, i32, Vec<i32>), Option<NumOp>>>,
}

fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let n: i64 = rng.gen_range(2..=40);
        let d: i64 = rng.gen_range(2..=40);
        if n != d {
            let v = Rational::new(n.into(), d.into());
            return if rng.gen_bool(0.5) { v } else { v.recip() };
        }
    }
}

impl<'a> Orbit<'a> {
    fn random<R: Rng>(model: &'a DellModel, rng: &mut R) -> Self {
        Orbit {
            model,
            x: (0..model.n).map(|_| random_rational(rng)).collect(),
            q: random_rational(rng),
            h: random_rational(rng),
            memo: Default::default(),
        }
    }

    fn caps(&self) -> [u32; 2] {
        self.model.caps()
    }

    fn pow(b: &Rational, e: i32) -> Rational {
        if e >= 0 {
            num_traits::Pow::pow(b, e as u32)
        } else {
            num_traits::Pow::pow(b.recip(), (-e) as u32)
        }
    }

    fn coord(&self, s: &[i32], i: usize) -> Rational {
        &self.x[i] * Self::pow(&self.q, s[i])
    }

    /// `theta_p(u)` through the caps (series in `p` only).
    fn theta(&self, u: &Rational) -> NumSeries {
        let caps = self.caps();
        let one = Rational::one();
        let mut acc = NumSeries::constant(caps, &one - u);
        for k in 1..=caps[0] {
            let mut f = NumSeries::constant(caps, one.clone());
            f.add_at(k, 0, &-u.clone());
            acc = acc.mul(&f);
            if self.model.theta == ThetaVariant::Full {
                let mut g = NumSeries::constant(caps, one.clone());
                g.add_at(k, 0, &-u.recip());
                acc = acc.mul(&g);
            }
        }
        acc
    }

    fn mode(&self, a: i32, s: &[i32]) -> NumOp {
        let caps = self.caps();
        let mut op = NumOp::new();
        for shift in self.model.shift_vectors(a) {
            let mut c = NumSeries::constant(caps, Rational::one());
            for i in 0..self.model.n {
                for j in i + 1..self.model.n {
                    let u = Self::pow(&self.h, shift[i] - shift[j]) * self.coord(s, i) / self.coord(s, j);
                    c = c.mul(&self.theta(&u));
                }
            }
            let mut out = NumSeries::zero(caps);
            let wt = w_weight(&shift);
            let sign = if a.rem_euclid(2) == 1 { -Rational::one() } else { Rational::one() };
            for p in 0..=caps[0] {
                for w in 0..=caps[1] {
                    if w + wt <= caps[1] {
                        let v = &c.c[c.idx(p, w)] * &sign;
                        out.add_at(p, w + wt, &v);
                    }
                }
            }
            op.insert(shift, out);
        }
        op
    }

    fn compose(&self, left: &NumOp, s: &[i32], right: impl Fn(&[i32]) -> Option<NumOp>) -> Option<NumOp> {
        let mut out = NumOp::new();
        for (m, am) in left {
            if am.is_zero() {
                continue;
            }
            let t: Vec<i32> = s.iter().zip(m).map(|(a, b)| a + b).collect();
            for (n, bn) in right(&t)? {
                let k: Vec<i32> = m.iter().zip(&n).map(|(a, b)| a + b).collect();
                let v = am.mul(&bn);
                out.entry(k).or_insert_with(|| NumSeries::zero(self.caps())).add(&v);
            }
        }
        Some(out)
    }

    fn memoized(&self, key: (u8, i32, Vec<i32>), f: impl FnOnce() -> Option<NumOp>) -> Option<NumOp> {
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = f();
        self.memo.lock().unwrap().insert(key, v.clone());
        v
    }

    /// `Y_k = (-S^{-1} R)^k S^{-1}` at `x q^s`.
    fn inverse_term(&self, k: i32, s: &[i32]) -> Option<NumOp> {
        self.memoized((0, k, s.to_vec()), || {
            let zero = vec![0; self.model.n];
            let o0 = self.mode(0, s);
            let sinv = o0.get(&zero)?.invert()?;
            if k == 0 {
                return Some(NumOp::from([(zero, sinv)]));
            }
            let step: NumOp = o0
                .into_iter()
                .filter(|(m, _)| m != &zero)
                .map(|(m, c)| (m, sinv.mul(&c).neg()))
                .collect();
            self.compose(&step, s, |t| self.inverse_term(k - 1, t))
        })
    }

    fn zero_mode_inverse(&self, s: &[i32]) -> Option<NumOp> {
        self.memoized((1, 0, s.to_vec()), || {
            let mut acc = NumOp::new();
            for k in 0..=self.caps()[1] as i32 {
                for (m, c) in self.inverse_term(k, s)? {
                    acc.entry(m).or_insert_with(|| NumSeries::zero(self.caps())).add(&c);
                }
            }
            Some(acc)
        })
    }

    fn hamiltonian(&self, a: usize, s: &[i32]) -> Option<NumOp> {
        self.memoized((2, a as i32, s.to_vec()), || {
            let inv = self.zero_mode_inverse(s)?;
            self.compose(&inv, s, |t| Some(self.mode(a as i32, t)))
        })
    }

    /// Orders at which `[H_a, H_b]` is nonzero at this orbit; `None` if the
    /// point hits a pole.
    fn commutator_orders(&self, a: usize, b: usize) -> Option<Vec<[u32; 2]>> {
        let s = vec![0; self.model.n];
        let ab = self.compose(&self.hamiltonian(a, &s)?, &s, |t| self.hamiltonian(b, t))?;
        let ba = self.compose(&self.hamiltonian(b, &s)?, &s, |t| self.hamiltonian(a, t))?;
        let mut orders = vec![];
        for (k, v) in &ab {
            let mut d = v.clone();
            if let Some(w) = ba.get(k) {
                d.add(&w.neg());
            }
            orders.extend(d.nonzero_orders());
        }
        for (k, w) in &ba {
            if !ab.contains_key(k) {
                orders.extend(w.nonzero_orders());
            }
        }
        Some(orders)
    }
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    rec(0, n, r, &mut vec![], &mut out);
    out
}

/// `sum_{|I|=r} prod_{i in I, j not in I} theta_p(h x_i/x_j)/theta_p(x_i/x_j) P_I`
/// with coefficients in `p` through `p_cap`.
pub fn ers_hamiltonian(n: usize, r: usize, p_cap: u32) -> Result<SeriesOperator> {
    if r == 0 || r > n {
        return Err(Error::OutOfRange { k: r, n });
    }
    let model = DellModel::new(n.max(2), p_cap, 0)?;
    let reg = model.registry();
    let small = ["p"];
    let caps = [p_cap];
    let mut op = ShiftOperator::zero(&model.coords(), "q");
    for subset in subsets(n, r) {
        let mut c = TruncatedSeries::one(&small, &caps, &reg);
        for &i in &subset {
            for j in (0..n).filter(|j| !subset.contains(j)) {
                let xi = RationalFunction::var(&reg, &format!("x{}", i + 1))?;
                let xj = RationalFunction::var(&reg, &format!("x{}", j + 1))?;
                let u = xi.checked_div(&xj)?;
                let h = RationalFunction::var(&reg, "h")?;
                let num = theta_expand(&(&h * &u), "p", p_cap)?;
                let den = theta_expand(&u, "p", p_cap)?.invert()?;
                c = &(&c * &num) * &den;
            }
        }
        let mut shift = vec![0; n];
        for &i in &subset {
            shift[i] = 1;
        }
        op.add_term(shift, c);
    }
    Ok(op)
}

/// The `w^0` part of an operator with `(p, w)` coefficients, as `p`-series.
pub fn w_zero_part(op: &SeriesOperator) -> Result<SeriesOperator> {
    Ok(op.map_coefficients(|c| {
        let mut out = TruncatedSeries::zero(&["p"], &[c.caps()[0]], c.registry());
        for (d, x) in c.terms() {
            if d[1] == 0 {
                out.insert(vec![d[0]], x.clone());
            }
        }
        Ok(out)
    })?)
}

/// Multiplies the `P^n` coefficient by `h^{-sum_j n_j (j-1)}`: the rescaling
/// `P_j -> h^{-(j-1)} P_j`.
pub fn rescale_momenta(op: &SeriesOperator) -> Result<SeriesOperator> {
    let mut out = op.zero_like();
    for (shift, c) in op.terms() {
        let e: i32 = shift.iter().enumerate().map(|(j, &k)| -(j as i32) * k).sum();
        let f = RationalFunction::var_pow(c.registry(), "h", e)?;
        out.add_term(shift.clone(), c.scale(&f));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct TierMatch {
    pub r: usize,
    /// `upper = factor * lower`.
    pub factor: Option<RationalFunction>,
    pub matches: bool,
    /// First offending `(shift, p-order)` when the match fails.
    pub first_failure: Option<(Vec<i32>, u32)>,
}

fn fit_factor(upper: &SeriesOperator, lower: &SeriesOperator, r: usize) -> Result<TierMatch> {
    let lead: Vec<i32> = (0..upper.n()).map(|i| i32::from(i < r)).collect();
    let u0 = upper.coeff(&lead).map(|c| c.coeff(&[0]));
    let l0 = lower.coeff(&lead).map(|c| c.coeff(&[0]));
    let factor = match (u0, l0) {
        (Some(u), Some(l)) if !l.is_zero() => Some(u.checked_div(&l)?),
        _ => None,
    };
    let Some(f) = factor.clone() else {
        return Ok(TierMatch {
            r,
            factor: None,
            matches: false,
            first_failure: Some((lead, 0)),
        });
    };
    let diff = upper.try_sub(&lower.map_coefficients(|c| Ok(c.scale(&f)))?)?;
    let mut first: Option<(Vec<i32>, u32)> = None;
    for (shift, c) in diff.terms() {
        if let Some(d) = c.lowest_degree() {
            if first.as_ref().map_or(true, |(_, o)| d[0] < *o) {
                first = Some((shift.clone(), d[0]));
            }
        }
    }
    Ok(TierMatch {
        r,
        factor,
        matches: first.is_none(),
        first_failure: first,
    })
}

#[derive(Clone, Debug)]
pub struct DegenerationReport {
    pub n: usize,
    pub caps: [u32; 2],
    /// DELL `H_a mod w` against the rescaled eRS Hamiltonian, `a = 1..N-1`.
    pub dell_to_ers: Vec<TierMatch>,
    /// Whether DELL mod w also matches eRS without the momentum rescaling.
    pub matches_without_rescaling: bool,
    /// eRS mod p against `trs_hamiltonian` with coupling `h`, `r = 1..N`.
    pub ers_to_trs: Vec<TierMatch>,
    /// At `h = 1` every tier reduces to `e_r(P)` up to the reported factors.
    pub hbar_one_consistent: bool,
}

impl DegenerationReport {
    pub fn passed(&self) -> bool {
        self.dell_to_ers.iter().all(|m| m.matches) && self.ers_to_trs.iter().all(|m| m.matches) && self.hbar_one_consistent
    }
}

fn at_hbar_one(op: &SeriesOperator) -> Result<SeriesOperator> {
    Ok(op.map_coefficients(|c| {
        let one = LaurentPoly::one(c.registry());
        c.try_map(|x| x.substitute("h", &one))
    })?)
}

/// `e_r(P)` with `p`-series coefficients.
fn free_hamiltonian(n: usize, r: usize, reg: &Registry, coords: &[String], p_cap: u32) -> SeriesOperator {
    let mut op = ShiftOperator::zero(coords, "q");
    for subset in subsets(n, r) {
        let mut shift = vec![0; n];
        for &i in &subset {
            shift[i] = 1;
        }
        op.add_term(shift, TruncatedSeries::one(&["p"], &[p_cap], reg));
    }
    op
}

pub fn degeneration_check(n: usize, p_cap: u32, w_cap: u32) -> Result<DegenerationReport> {
    let model = DellModel::new(n, p_cap, w_cap)?;
    let reg = model.registry();
    let coords = model.coords();
    let dell: Vec<SeriesOperator> = dell_hamiltonians(&model)?.iter().map(w_zero_part).collect::<Result<_>>()?;
    let ers: Vec<SeriesOperator> = (1..=n).map(|r| ers_hamiltonian(n, r, p_cap)).collect::<Result<_>>()?;
    let mut dell_to_ers = vec![];
    let mut plain = true;
    for (a, h) in dell.iter().enumerate() {
        let r = a + 1;
        dell_to_ers.push(fit_factor(h, &rescale_momenta(&ers[a])?, r)?);
        plain &= fit_factor(h, &ers[a], r)?.matches;
    }
    let frame = TrsFrame::generic(n, "x", "h");
    let mut ers_to_trs = vec![];
    for (k, e) in ers.iter().enumerate() {
        let r = k + 1;
        let t = trs_hamiltonian(&frame, r)?.to_series(&["p"], &[0]);
        ers_to_trs.push(fit_factor(&e.map_coefficients(|c| Ok(c.truncate(&[0])))?, &t, r)?);
    }
    let mut hbar_one = true;
    for (a, h) in dell.iter().enumerate() {
        let free = free_hamiltonian(n, a + 1, &reg, &coords, p_cap);
        hbar_one &= fit_factor(&at_hbar_one(h)?, &free, a + 1)?.matches;
    }
    for (k, e) in ers.iter().enumerate() {
        let free = free_hamiltonian(n, k + 1, &reg, &coords, p_cap);
        hbar_one &= fit_factor(&at_hbar_one(e)?, &free, k + 1)?.matches;
        let t = trs_hamiltonian(&frame, k + 1)?.to_series(&["p"], &[0]);
        hbar_one &= fit_factor(&at_hbar_one(&t)?, &free_hamiltonian(n, k + 1, &reg, &coords, 0), k + 1)?.matches;
    }
    Ok(DegenerationReport {
        n,
        caps: [p_cap, w_cap],
        dell_to_ers,
        matches_without_rescaling: plain,
        ers_to_trs,
        hbar_one_consistent: hbar_one,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qoper_algebra::parse_rational_function;

    fn rf(reg: &Registry, s: &str) -> RationalFunction {
        parse_rational_function(reg, s).unwrap()
    }

    #[test]
    fn window_and_weights() {
        assert_eq!(DellModel::new(3, 0, 0).unwrap().shift_window(), (0, 1));
        assert_eq!(DellModel::new(3, 0, 1).unwrap().shift_window(), (-1, 2));
        assert_eq!(DellModel::new(3, 0, 3).unwrap().shift_window(), (-2, 3));
        assert_eq!(w_weight(&[2, -1, 0]), 2);
        let m = DellModel::new(3, 0, 1).unwrap();
        for mode in -3..=3 {
            for s in m.shift_vectors(mode) {
                assert_eq!(s.iter().sum::<i32>(), mode);
                assert!(w_weight(&s) <= 1);
            }
        }
    }

    #[test]
    fn n2_modes_mod_p_w() {
        let m = DellModel::new(2, 0, 0).unwrap();
        let reg = m.registry();
        let o0 = dell_mode(&m, 0).unwrap();
        assert_eq!(o0.len(), 1);
        assert_eq!(o0.coeff(&[0, 0]).unwrap().constant_term(), rf(&reg, "1 - x1/x2"));
        let o1 = dell_mode(&m, 1).unwrap();
        assert_eq!(o1.coeff(&[1, 0]).unwrap().constant_term(), rf(&reg, "-(1 - h*x1/x2)"));
        assert_eq!(o1.coeff(&[0, 1]).unwrap().constant_term(), rf(&reg, "-(1 - h^-1*x1/x2)"));
        let h1 = dell_hamiltonian(&m, 1).unwrap();
        assert_eq!(h1.coeff(&[1, 0]).unwrap().constant_term(), rf(&reg, "-(1 - h*x1/x2)/(1 - x1/x2)"));
    }

    #[test]
    fn ers_at_p0_is_trs() {
        let e = ers_hamiltonian(3, 1, 0).unwrap();
        let t = trs_hamiltonian(&TrsFrame::generic(3, "x", "h"), 1).unwrap();
        for (s, c) in t.terms() {
            assert_eq!(&e.coeff(s).unwrap().constant_term(), c);
        }
        let top = ers_hamiltonian(3, 3, 2).unwrap();
        assert_eq!(top.len(), 1);
        assert!(top.coeff(&[1, 1, 1]).unwrap().as_constant().unwrap().is_one());
    }

    #[test]
    fn inverse_of_zero_mode() {
        let m = DellModel::new(3, 1, 1).unwrap();
        let o0 = dell_mode(&m, 0).unwrap();
        let inv = invert_zero_mode(&o0).unwrap();
        let id = inv.compose(&o0).unwrap();
        let reg = m.registry();
        let one = TruncatedSeries::one(&m.small(), &m.caps(), &reg);
        assert_eq!(id, id.term_like(vec![0, 0, 0], one));
    }

    #[test]
    fn pointwise_matches_symbolic() {
        for th in [ThetaVariant::Full, ThetaVariant::Corrupted] {
            let m = DellModel::new(3, 1, 0).unwrap().with_theta(th);
            let a = dell_commutativity_certificate_with(&m, CertificateMethod::Symbolic).unwrap();
            let b = dell_commutativity_certificate(&m).unwrap();
            assert_eq!(a.pairs, b.pairs);
            assert_eq!(a.passed(), th == ThetaVariant::Full);
        }
    }
}
