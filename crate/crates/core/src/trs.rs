//! Trigonometric Ruijsenaars-Schneider operators, the classical Lax matrix,
//! and the quantum/classical duality solver.

use nalgebra::{DMatrix, DVector};
use qoper_algebra::{LaurentPoly, RationalFunction, Registry, ShiftOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{elementary, permutations, roots, subsets, UPoly, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameKind {
    Magnetic,
    Electric,
    /// Any coordinates with a free coupling.
    Generic,
}

/// Coordinates, shift base and coupling of a tRS operator family.
#[derive(Clone, Debug)]
pub struct TrsFrame {
    pub kind: FrameKind,
    pub coords: Vec<String>,
    pub q: String,
    /// A monomial in the frame registry, e.g. `q^-1`, `q`, `t` or `h`.
    pub coupling: LaurentPoly,
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

impl TrsFrame {
    /// Coordinates `xi1..xiN`, coupling `q^-1`.
    pub fn magnetic(n: usize) -> Self {
        let coords = names("xi", n);
        let reg = Self::registry_for(&coords, "q", &[]);
        TrsFrame {
            kind: FrameKind::Magnetic,
            coupling: LaurentPoly::var_pow(&reg, "q", -1).unwrap(),
            coords,
            q: "q".into(),
        }
    }

    /// Coordinates `a1..aN`, coupling `q`.
    pub fn electric(n: usize) -> Self {
        let coords = names("a", n);
        let reg = Self::registry_for(&coords, "q", &[]);
        TrsFrame {
            kind: FrameKind::Electric,
            coupling: LaurentPoly::var(&reg, "q").unwrap(),
            coords,
            q: "q".into(),
        }
    }

    /// Coordinates `{prefix}1..{prefix}N` with a symbolic coupling variable.
    pub fn generic(n: usize, prefix: &str, coupling: &str) -> Self {
        let coords = names(prefix, n);
        let reg = Self::registry_for(&coords, "q", &[coupling]);
        TrsFrame {
            kind: FrameKind::Generic,
            coupling: LaurentPoly::var(&reg, coupling).unwrap(),
            coords,
            q: "q".into(),
        }
    }

    fn registry_for(coords: &[String], q: &str, extra: &[&str]) -> Registry {
        let mut all: Vec<String> = coords.to_vec();
        all.push(q.to_string());
        all.extend(extra.iter().map(|s| s.to_string()));
        Registry::new(&all)
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn registry(&self) -> Registry {
        Self::registry_for(&self.coords, &self.q, &[]).union(self.coupling.registry())
    }
}

/// `prod_{i in I, j not in I} (t c_i - c_j)/(c_i - c_j)`.
fn subset_coefficient(frame: &TrsFrame, reg: &Registry, subset: &[usize]) -> Result<RationalFunction> {
    let t = frame.coupling.to_registry(reg)?;
    let mut num = LaurentPoly::one(reg);
    let mut den = LaurentPoly::one(reg);
    for &i in subset {
        let ci = LaurentPoly::var(reg, &frame.coords[i])?;
        for j in (0..frame.n()).filter(|j| !subset.contains(j)) {
            let cj = LaurentPoly::var(reg, &frame.coords[j])?;
            num = &num * &(&(&t * &ci) - &cj);
            den = &den * &(&ci - &cj);
        }
    }
    Ok(RationalFunction::new(num, den)?)
}

/// `H_k = sum_{|I|=k} prod_{i in I, j not in I} (t c_i - c_j)/(c_i - c_j) P_I`.
pub fn trs_hamiltonian(frame: &TrsFrame, k: usize) -> Result<ShiftOperator<RationalFunction>> {
    let n = frame.n();
    if k == 0 || k > n {
        return Err(Error::OutOfRange { k, n });
    }
    let reg = frame.registry();
    let mut op = ShiftOperator::zero(&frame.coords, &frame.q);
    for subset in subsets(n, k) {
        let mut shift = vec![0; n];
        for &i in &subset {
            shift[i] = 1;
        }
        op.add_term(shift, subset_coefficient(frame, &reg, &subset)?);
    }
    Ok(op)
}

/// Result of checking `[H_k, H_l] = 0` for all pairs.
#[derive(Clone, Debug)]
pub struct CommutationReport {
    pub n: usize,
    pub pairs_checked: usize,
    pub nonzero_pairs: Vec<(usize, usize)>,
}

impl CommutationReport {
    pub fn all_zero(&self) -> bool {
        self.nonzero_pairs.is_empty()
    }
}

pub fn check_commutativity(frame: &TrsFrame) -> Result<CommutationReport> {
    let n = frame.n();
    let hs: Vec<_> = (1..=n).map(|k| trs_hamiltonian(frame, k)).collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|k| (k + 1..=n).map(move |l| (k, l))).collect();
    let results: Vec<Result<bool>> = pairs
        .par_iter()
        .map(|&(k, l)| Ok(hs[k - 1].commutator(&hs[l - 1])?.is_zero()))
        .collect();
    let mut nonzero = Vec::new();
    for (pair, r) in pairs.iter().zip(results) {
        if !r? {
            nonzero.push(*pair);
        }
    }
    Ok(CommutationReport {
        n,
        pairs_checked: pairs.len(),
        nonzero_pairs: nonzero,
    })
}

// ---------------------------------------------------------------- classical

fn check_distinct(xs: &[C64]) -> Result<()> {
    let scale = xs.iter().map(|x| x.norm()).fold(1.0, f64::max);
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if (xs[i] - xs[j]).norm() <= 1e-12 * scale {
                return Err(Error::CoincidentCoordinates(i + 1, j + 1));
            }
        }
    }
    Ok(())
}

/// Coefficient of `P_I` at numeric coordinates.
pub fn subset_coefficient_value(coords: &[C64], t: C64, subset: &[usize]) -> C64 {
    let mut c = C64::new(1.0, 0.0);
    for &i in subset {
        for j in (0..coords.len()).filter(|j| !subset.contains(j)) {
            c *= (t * coords[i] - coords[j]) / (coords[i] - coords[j]);
        }
    }
    c
}

/// Classical values `H_1..H_N` at `(coords, p)` with coupling `t`.
pub fn hamiltonian_values(coords: &[C64], p: &[C64], t: C64) -> Vec<C64> {
    let n = coords.len();
    (1..=n)
        .map(|k| {
            subsets(n, k)
                .iter()
                .map(|s| subset_coefficient_value(coords, t, s) * s.iter().map(|&i| p[i]).product::<C64>())
                .sum()
        })
        .collect()
}

/// Which index of the printed Lax matrix formula carries the momentum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaxReading {
    /// `T_ij = p_i prod_{m != j}(xi_i/q - xi_m) / prod_{l != j}(xi_j - xi_l)`.
    Literal,
    Transposed,
}

pub fn trs_lax(xi: &[C64], p: &[C64], q: C64, reading: LaxReading) -> Result<DMatrix<C64>> {
    check_distinct(xi)?;
    let n = xi.len();
    let mut t = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            let mut num = C64::new(1.0, 0.0);
            let mut den = C64::new(1.0, 0.0);
            for m in (0..n).filter(|&m| m != j) {
                num *= xi[i] / q - xi[m];
                den *= xi[j] - xi[m];
            }
            t[(i, j)] = num / den * p[i];
        }
    }
    Ok(match reading {
        LaxReading::Literal => t,
        LaxReading::Transposed => t.transpose(),
    })
}

/// Coefficients `c_0..c_N` of `det(z - T)` (Faddeev-LeVerrier).
pub fn char_poly(t: &DMatrix<C64>) -> Vec<C64> {
    let n = t.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    c[n] = C64::new(1.0, 0.0);
    let mut m = DMatrix::<C64>::zeros(n, n);
    for k in 1..=n {
        m = t * &m + &id * c[n - k + 1];
        let tm = t * &m;
        c[n - k] = -tm.trace() / C64::new(k as f64, 0.0);
    }
    c
}

/// Compares `(-1)^k e_k(T)` with `q^{-k(k-1)/2} H_k(t = q^{-1})`; returns the
/// largest relative deviation.
pub fn lax_consistency(xi: &[C64], p: &[C64], q: C64, reading: LaxReading) -> Result<f64> {
    let n = xi.len();
    let t = trs_lax(xi, p, q, reading)?;
    let cp = char_poly(&t);
    let h = hamiltonian_values(xi, p, q.inv());
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let from_lax = cp[n - k] * sign;
        let expect = h[k - 1] * q.powi(-((k * (k - 1) / 2) as i32));
        worst = worst.max((from_lax - expect).norm() / expect.norm().max(1e-300));
    }
    Ok(worst)
}

// ---------------------------------------------------------------- duality

/// How the tRS Hamiltonians are matched with the singularity data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualityNormalization {
    /// `q^{-k(k-1)/2} H_k = e_k(a)`: the characteristic polynomial of the oper
    /// equals `Lambda(z)` exactly.
    Spectral,
    /// `H_k = e_k(a)` as printed.
    Paper,
}

impl DualityNormalization {
    /// Target values for `H_1..H_N` given `e_k` of the singularities and the shift `q`.
    pub fn targets(self, singularities: &[C64], q: C64) -> Vec<C64> {
        let e = elementary(singularities);
        (1..=singularities.len())
            .map(|k| match self {
                DualityNormalization::Spectral => e[k] * q.powi((k * (k - 1) / 2) as i32),
                DualityNormalization::Paper => e[k],
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub dedup: f64,
    pub seed: u64,
    pub max_solutions: Option<usize>,
    pub normalization: DualityNormalization,
    /// Random restarts tried when continuation misses solutions.
    pub fallback_starts: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            dedup: 1e-6,
            seed: 0,
            max_solutions: None,
            normalization: DualityNormalization::Spectral,
            fallback_starts: 400,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalPoint {
    pub coords: Vec<C64>,
    pub momenta: Vec<C64>,
}

#[derive(Clone, Debug)]
pub struct DualitySolution {
    pub points: Vec<ClassicalPoint>,
    /// `max_k |H_k - target_k|` per point.
    pub residuals: Vec<f64>,
    pub targets: Vec<C64>,
    pub coupling: C64,
    pub expected: usize,
    pub paths_converged: usize,
    pub fallback_used: usize,
}

impl DualitySolution {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn is_complete(&self) -> bool {
        self.points.len() == self.expected
    }
}

/// The polynomial map `p -> (H_k(p; t) - target_k)` with its Jacobian.
struct MomentumSystem<'a> {
    coords: &'a [C64],
    targets: &'a [C64],
    subsets: Vec<Vec<Vec<usize>>>,
}

impl<'a> MomentumSystem<'a> {
    fn new(coords: &'a [C64], targets: &'a [C64]) -> Self {
        let n = coords.len();
        MomentumSystem {
            coords,
            targets,
            subsets: (1..=n).map(|k| subsets(n, k)).collect(),
        }
    }

    fn n(&self) -> usize {
        self.coords.len()
    }

    fn coefficient_and_derivative(&self, t: C64, s: &[usize]) -> (C64, C64) {
        let mut factors = Vec::new();
        let mut derivs = Vec::new();
        for &i in s {
            for j in (0..self.n()).filter(|j| !s.contains(j)) {
                let d = self.coords[i] - self.coords[j];
                factors.push((t * self.coords[i] - self.coords[j]) / d);
                derivs.push(self.coords[i] / d);
            }
        }
        let c: C64 = factors.iter().product();
        let mut dc = C64::new(0.0, 0.0);
        for m in 0..factors.len() {
            let mut prod = derivs[m];
            for (l, f) in factors.iter().enumerate() {
                if l != m {
                    prod *= f;
                }
            }
            dc += prod;
        }
        (c, dc)
    }

    /// Residual vector, Jacobian in p, and derivative in t.
    fn eval(&self, p: &[C64], t: C64) -> (DVector<C64>, DMatrix<C64>, DVector<C64>) {
        let n = self.n();
        let mut f = DVector::from_element(n, C64::new(0.0, 0.0));
        let mut jac = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        let mut ft = DVector::from_element(n, C64::new(0.0, 0.0));
        for k in 0..n {
            for s in &self.subsets[k] {
                let (c, dc) = self.coefficient_and_derivative(t, s);
                let prod: C64 = s.iter().map(|&i| p[i]).product();
                f[k] += c * prod;
                ft[k] += dc * prod;
                for &m in s {
                    let partial: C64 = s.iter().filter(|&&i| i != m).map(|&i| p[i]).product();
                    jac[(k, m)] += c * partial;
                }
            }
            f[k] -= self.targets[k];
        }
        (f, jac, ft)
    }

    fn residual(&self, p: &[C64], t: C64) -> f64 {
        let h = hamiltonian_values(self.coords, p, t);
        h.iter().zip(self.targets).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Damped Newton at fixed t. Returns the point and whether it converged.
    fn newton(&self, p0: &[C64], t: C64, iters: usize, tol: f64) -> (Vec<C64>, bool) {
        let mut p = p0.to_vec();
        let mut res = self.residual(&p, t);
        for _ in 0..iters {
            if res < tol {
                return (p, true);
            }
            let (f, jac, _) = self.eval(&p, t);
            let step = match jac.lu().solve(&f) {
                Some(s) => s,
                None => return (p, false),
            };
            let mut lambda = 1.0;
            loop {
                let trial: Vec<C64> = p.iter().zip(step.iter()).map(|(x, d)| x - d * lambda).collect();
                let r = self.residual(&trial, t);
                if r.is_finite() && (r < res || lambda < 1e-3) {
                    p = trial;
                    res = r;
                    break;
                }
                lambda *= 0.5;
            }
        }
        (p, res < tol)
    }

    /// Continuation in the coupling from `t = 1` (where `H_k = e_k(p)`) to `target_t`.
    fn track(&self, start: &[C64], target_t: C64, gamma: C64) -> Option<Vec<C64>> {
        let path = |s: f64| C64::new(1.0, 0.0) + (target_t - 1.0) * s + gamma * s * (1.0 - s);
        let dpath = |s: f64| (target_t - 1.0) + gamma * (1.0 - 2.0 * s);
        let mut p = start.to_vec();
        let mut s = 0.0f64;
        let mut h = 0.02f64;
        while s < 1.0 {
            if h < 1e-9 {
                return None;
            }
            let h_step = h.min(1.0 - s);
            let (_, jac, ft) = self.eval(&p, path(s));
            let lu = jac.lu();
            let rhs = ft * dpath(s);
            let dp = lu.solve(&rhs)?;
            let predicted: Vec<C64> = p.iter().zip(dp.iter()).map(|(x, d)| x - d * h_step).collect();
            let t_new = path(s + h_step);
            let scale = 1.0 + predicted.iter().map(|x| x.norm()).fold(0.0, f64::max);
            let mut q = predicted;
            let mut ok = false;
            for _ in 0..6 {
                let (f, jac, _) = self.eval(&q, t_new);
                let step = match jac.lu().solve(&f) {
                    Some(v) => v,
                    None => break,
                };
                let size = step.iter().map(|x| x.norm()).fold(0.0, f64::max);
                for (x, d) in q.iter_mut().zip(step.iter()) {
                    *x -= d;
                }
                if !size.is_finite() {
                    break;
                }
                if size < 1e-10 * scale {
                    ok = true;
                    break;
                }
            }
            let moved = q.iter().zip(&p).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            if ok && moved < 0.25 * scale {
                p = q;
                s += h_step;
                h = (h * 1.6).min(0.1);
            } else {
                h *= 0.5;
            }
        }
        Some(p)
    }
}

fn same_point(a: &[C64], b: &[C64], rel: f64) -> bool {
    let scale = a.iter().map(|x| x.norm()).fold(1.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) <= rel * scale
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Finds all momenta `p` with `H_k(coords, p; coupling) = targets_k`.
pub fn solve_momenta(coords: &[C64], coupling: C64, targets: &[C64], opts: &SolveOptions) -> Result<DualitySolution> {
    check_distinct(coords)?;
    let n = coords.len();
    let sys = MomentumSystem::new(coords, targets);
    let expected = factorial(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let gamma = C64::from_polar(0.7, rng.gen_range(0.3..2.8));

    // At t = 1 the system is e_k(p) = target_k: p is a permutation of the roots.
    let mut char_coeffs = vec![C64::new(0.0, 0.0); n + 1];
    char_coeffs[n] = C64::new(1.0, 0.0);
    for k in 1..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        char_coeffs[n - k] = targets[k - 1] * sign;
    }
    let rts = roots(&UPoly::new(char_coeffs));
    let starts: Vec<Vec<C64>> = permutations(n)
        .into_iter()
        .map(|perm| perm.iter().map(|&i| rts[i]).collect())
        .collect();
    let tracked: Vec<Option<Vec<C64>>> = starts
        .par_iter()
        .map(|s| {
            let end = sys.track(s, coupling, gamma)?;
            let (p, ok) = sys.newton(&end, coupling, 30, opts.tol * 1e-3);
            (ok || sys.residual(&p, coupling) < opts.tol).then_some(p)
        })
        .collect();
    let paths_converged = tracked.iter().filter(|p| p.is_some()).count();
    let mut found: Vec<Vec<C64>> = Vec::new();
    for p in tracked.into_iter().flatten() {
        if !found.iter().any(|f| same_point(f, &p, opts.dedup)) {
            found.push(p);
        }
    }

    let mut fallback_used = 0;
    let radius = 1.0 + rts.iter().map(|r| r.norm()).fold(0.0, f64::max) * 2.0;
    while found.len() < expected && fallback_used < opts.fallback_starts {
        let batch: Vec<Vec<C64>> = (0..16)
            .map(|_| {
                (0..n)
                    .map(|_| C64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
                    .collect()
            })
            .collect();
        fallback_used += batch.len();
        let results: Vec<(Vec<C64>, bool)> = batch
            .par_iter()
            .map(|s| sys.newton(s, coupling, 80, opts.tol * 1e-3))
            .collect();
        for (p, ok) in results {
            let ok = ok || sys.residual(&p, coupling) < opts.tol;
            if ok && !found.iter().any(|f| same_point(f, &p, opts.dedup)) {
                found.push(p);
            }
        }
    }

    if let Some(m) = opts.max_solutions {
        found.truncate(m);
    }
    let residuals = found.iter().map(|p| sys.residual(p, coupling)).collect();
    Ok(DualitySolution {
        points: found
            .into_iter()
            .map(|momenta| ClassicalPoint {
                coords: coords.to_vec(),
                momenta,
            })
            .collect(),
        residuals,
        targets: targets.to_vec(),
        coupling,
        expected,
        paths_converged,
        fallback_used,
    })
}

/// Momenta of the magnetic frame (coordinates `xi`, coupling `q^-1`) dual to
/// singularities `a`. Partial results are returned; use
/// [`DualitySolution::is_complete`] or [`duality_solve_strict`] to insist on `N!`.
pub fn duality_solve(xi: &[C64], a: &[C64], q: C64, opts: &SolveOptions) -> Result<DualitySolution> {
    if xi.len() != a.len() {
        return Err(Error::Invalid("xi and a must have the same length".into()));
    }
    let targets = opts.normalization.targets(a, q);
    solve_momenta(xi, q.inv(), &targets, opts)
}

/// Like [`duality_solve`] but fails unless exactly `N!` solutions were found.
pub fn duality_solve_strict(xi: &[C64], a: &[C64], q: C64, opts: &SolveOptions) -> Result<DualitySolution> {
    let sol = duality_solve(xi, a, q, opts)?;
    let want = opts.max_solutions.map_or(sol.expected, |m| m.min(sol.expected));
    if sol.count() < want {
        return Err(Error::SolverFailed {
            found: sol.count(),
            expected: want,
        });
    }
    Ok(sol)
}

/// Random generic duality data: twists, singularities and `q`.
#[derive(Clone, Debug)]
pub struct DualityData {
    pub xi: Vec<C64>,
    pub a: Vec<C64>,
    pub q: C64,
}

fn unit_annulus<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Samples `(xi, a, q)` with `|xi_i|, |a_i|` in `[0.5, 2)` and `|q|` in `[0.3, 0.9)`,
/// rejecting data whose twists are closer than `0.1` up to a factor `q^{+-1}`.
pub fn sample_duality_data<R: Rng>(rng: &mut R, n: usize) -> DualityData {
    loop {
        let q = C64::from_polar(rng.gen_range(0.3..0.9), rng.gen_range(0.0..std::f64::consts::TAU));
        let xi: Vec<C64> = (0..n).map(|_| unit_annulus(rng)).collect();
        let a: Vec<C64> = (0..n).map(|_| unit_annulus(rng)).collect();
        let spread = |v: &[C64]| {
            let mut m = f64::INFINITY;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        for f in [C64::new(1.0, 0.0), q, q.inv()] {
                            m = m.min((v[i] - f * v[j]).norm());
                        }
                    }
                }
            }
            m
        };
        if spread(&xi) > 0.1 && spread(&a) > 0.1 {
            return DualityData { xi, a, q };
        }
    }
}

#[derive(Clone, Debug)]
pub struct MirrorReport {
    pub magnetic_count: usize,
    pub electric_count: usize,
    pub magnetic_max_residual: f64,
    pub electric_max_residual: f64,
    pub electric: DualitySolution,
    /// Solving the mirrored problem again returns the magnetic solution set.
    pub involution_matches: bool,
    pub involution_max_residual: f64,
    pub tol: f64,
}

impl MirrorReport {
    pub fn passed(&self) -> bool {
        self.magnetic_count == self.electric_count
            && self.magnetic_max_residual < self.tol
            && self.electric_max_residual < self.tol
            && self.involution_matches
            && self.involution_max_residual < self.tol
    }
}

/// Runs the electric system on mirrored data (`xi <-> a`, `q -> q^-1`) and
/// compares it with the magnetic solutions.
pub fn mirror_check(magnetic: &DualitySolution, a: &[C64], xi: &[C64], q: C64, opts: &SolveOptions) -> Result<MirrorReport> {
    let electric = duality_solve(a, xi, q.inv(), opts)?;
    // Re-mirror: the mirror of the electric problem is the magnetic one.
    let back = duality_solve(xi, a, q, opts)?;
    let involution_matches = back.count() == magnetic.count()
        && magnetic
            .points
            .iter()
            .all(|m| back.points.iter().any(|b| same_point(&m.momenta, &b.momenta, opts.dedup)));
    Ok(MirrorReport {
        magnetic_count: magnetic.count(),
        electric_count: electric.count(),
        magnetic_max_residual: magnetic.max_residual(),
        electric_max_residual: electric.max_residual(),
        involution_max_residual: back.max_residual(),
        electric,
        involution_matches,
        tol: opts.tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qoper_algebra::parse_rational_function;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn small_hamiltonians() {
        let f = TrsFrame::generic(1, "x", "t");
        let h = trs_hamiltonian(&f, 1).unwrap();
        assert_eq!(h.len(), 1);
        assert!(h.coeff(&[1]).unwrap().is_one());

        let f = TrsFrame::generic(2, "x", "t");
        let h2 = trs_hamiltonian(&f, 2).unwrap();
        assert!(h2.coeff(&[1, 1]).unwrap().is_one());
        let h1 = trs_hamiltonian(&f, 1).unwrap();
        let reg = f.registry();
        let c1 = parse_rational_function(&reg, "(t*x1 - x2)/(x1 - x2)").unwrap();
        assert_eq!(h1.coeff(&[1, 0]).unwrap(), &c1);
        assert!(trs_hamiltonian(&f, 3).is_err());
    }

    #[test]
    fn n2_commutes() {
        let rep = check_commutativity(&TrsFrame::generic(2, "x", "t")).unwrap();
        assert_eq!(rep.pairs_checked, 1);
        assert!(rep.all_zero());
    }

    #[test]
    fn lax_matches_hamiltonians() {
        let xi = [c(1.1, 0.2), c(-0.7, 0.5), c(0.3, -1.2)];
        let p = [c(0.4, 0.1), c(1.3, -0.2), c(-0.6, 0.9)];
        let q = c(0.8, 0.3);
        assert!(lax_consistency(&xi, &p, q, LaxReading::Literal).unwrap() < 1e-12);
        assert!(lax_consistency(&xi, &p, q, LaxReading::Transposed).unwrap() < 1e-12);
        // at q = 1 the trace is the free Hamiltonian
        let t = trs_lax(&xi, &p, c(1.0, 0.0), LaxReading::Literal).unwrap();
        assert!((t.trace() - p.iter().sum::<C64>()).norm() < 1e-12);
        assert!(trs_lax(&[c(1.0, 0.0), c(1.0, 0.0)], &p[..2], q, LaxReading::Literal).is_err());
    }

    #[test]
    fn n1_and_n2_duality() {
        let opts = SolveOptions::default();
        let sol = duality_solve(&[c(0.5, 0.1)], &[c(1.7, -0.4)], c(0.9, 0.2), &opts).unwrap();
        assert_eq!(sol.count(), 1);
        assert!((sol.points[0].momenta[0] - c(1.7, -0.4)).norm() < 1e-12);

        let xi = [c(1.0, 0.3), c(-0.4, 0.8)];
        let a = [c(0.7, -0.2), c(1.5, 0.6)];
        let sol = duality_solve(&xi, &a, c(1.2, -0.3), &opts).unwrap();
        assert_eq!(sol.count(), 2);
        assert!(sol.max_residual() < 1e-10);
    }
}
