//! Trivialized q-opers: quantum Wronskian minors, Q-polynomials, QQ-system and
//! Bethe residuals.
//!
//! Rows are indexed `0..=r`. `D_k` is the minor of `[xi_i^j s_i(q^j z)]` on the
//! last `k` rows and first `k` columns. `Q^+_j` uses the last `j` rows, `Q^-_j`
//! the same rows with the first one replaced by its predecessor; both are
//! divided by the matching Vandermonde minor of `[(q xi_i)^j]`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{det, roots, Field, UPoly, C64};

#[derive(Clone, Debug)]
pub struct QOperData<F: Field> {
    pub r: usize,
    pub sections: Vec<UPoly<F>>,
    pub xi: Vec<F>,
    pub q: F,
    /// `Lambda_1..Lambda_r`.
    pub lambdas: Vec<UPoly<F>>,
    /// `W_0..W_{r+1}`.
    pub wronskians: Vec<UPoly<F>>,
}

fn tolerance_zero<F: Field>(p: &UPoly<F>, scale: f64, tol: f64) -> bool {
    if F::is_exact() {
        p.is_zero()
    } else {
        p.max_norm() <= tol * scale.max(f64::MIN_POSITIVE)
    }
}

impl<F: Field> QOperData<F> {
    /// General data; the Wronskians follow `W_k = P_1(z) P_2(qz) ... P_k(q^{k-1} z)`
    /// with `P_i = Lambda_r Lambda_{r-1} ... Lambda_{r-i+1}`.
    pub fn new(sections: Vec<UPoly<F>>, xi: Vec<F>, q: F, lambdas: Vec<UPoly<F>>) -> Result<Self> {
        let r = sections.len().checked_sub(1).ok_or_else(|| Error::Invalid("no sections".into()))?;
        if xi.len() != r + 1 || lambdas.len() != r {
            return Err(Error::Invalid(format!(
                "rank {r} needs {} twists and {r} singularity polynomials",
                r + 1
            )));
        }
        let p_i = |i: usize| -> UPoly<F> {
            ((r + 1 - i).max(1)..=r).fold(UPoly::one(), |acc, l| &acc * &lambdas[l - 1])
        };
        let mut wronskians = vec![UPoly::one()];
        for k in 1..=r + 1 {
            let mut w = UPoly::one();
            for i in 1..=k {
                w = &w * &p_i(i).dilate(&q.pow(i as u32 - 1));
            }
            wronskians.push(w);
        }
        Ok(QOperData {
            r,
            sections,
            xi,
            q,
            lambdas,
            wronskians,
        })
    }

    /// The tRS specialization: `s_i = z - p_i`, `Lambda_r = prod (z - a_i)`, the
    /// other `Lambda_i = 1`, and `W_k = 1` for `k <= r`, `W_{r+1} = Lambda`.
    pub fn trs(xi: &[F], p: &[F], a: &[F], q: F) -> Result<Self> {
        let n = xi.len();
        if n == 0 || p.len() != n || a.len() != n {
            return Err(Error::Invalid("xi, p and a must have equal nonzero length".into()));
        }
        let r = n - 1;
        let lambda = UPoly::from_roots(a);
        let mut lambdas = vec![UPoly::one(); r];
        if r > 0 {
            lambdas[r - 1] = lambda.clone();
        }
        let mut wronskians = vec![UPoly::one(); r + 1];
        wronskians.push(lambda);
        Ok(QOperData {
            r,
            sections: p.iter().map(|pi| UPoly::linear_root(pi.clone())).collect(),
            xi: xi.to_vec(),
            q,
            lambdas,
            wronskians,
        })
    }

    /// The full singularity polynomial `Lambda(z) = W_{r+1}` in the tRS case.
    pub fn lambda(&self) -> &UPoly<F> {
        &self.wronskians[self.r + 1]
    }

    fn entry(&self, row: usize, col: usize) -> UPoly<F> {
        self.sections[row]
            .dilate(&self.q.pow(col as u32))
            .scale(&self.xi[row].pow(col as u32))
    }

    /// Minor on the given rows and the first `rows.len()` columns.
    pub fn minor(&self, rows: &[usize]) -> UPoly<F> {
        let m: Vec<Vec<UPoly<F>>> = rows
            .iter()
            .map(|&i| (0..rows.len()).map(|j| self.entry(i, j)).collect())
            .collect();
        det(&m)
    }

    pub fn vandermonde_minor(&self, rows: &[usize]) -> F {
        let m: Vec<Vec<F>> = rows
            .iter()
            .map(|&i| (0..rows.len()).map(|j| (self.q.clone() * self.xi[i].clone()).pow(j as u32)).collect())
            .collect();
        det(&m)
    }

    fn last_rows(&self, k: usize) -> Vec<usize> {
        (self.r + 1 - k..=self.r).collect()
    }

    /// `D_k` for `1 <= k <= r + 1`.
    pub fn flag_determinant(&self, k: usize) -> Result<UPoly<F>> {
        if k == 0 || k > self.r + 1 {
            return Err(Error::OutOfRange { k, n: self.r + 1 });
        }
        Ok(self.minor(&self.last_rows(k)))
    }

    /// `F_j(z) = W_{r-j}(q^{j-r} z)`.
    fn normalization(&self, j: usize) -> UPoly<F> {
        let w = &self.wronskians[self.r - j];
        let qinv = F::one().checked_div(&self.q).expect("q != 0");
        w.dilate(&qinv.pow((self.r - j) as u32))
    }

    fn normalized_minor(&self, rows: &[usize], j: usize) -> Result<UPoly<F>> {
        let v = self.vandermonde_minor(rows);
        let inv = F::one().checked_div(&v).ok_or(Error::SingularVandermonde)?;
        if !F::is_exact() && v.magnitude() < 1e-300 {
            return Err(Error::SingularVandermonde);
        }
        let m = self.minor(rows).scale(&inv);
        let f = self.normalization(j);
        let (quot, rem) = m.div_rem(&f).ok_or(Error::NotDivisible { k: j })?;
        if !tolerance_zero(&rem, m.max_norm(), 1e-9) {
            return Err(Error::NotDivisible { k: j });
        }
        Ok(quot)
    }

    /// `(Q^+_j, Q^-_j)` for `1 <= j <= r`. `Q^+_{r+1}` (the full minor) is
    /// available with `j = r + 1`, in which case `Q^-` is `None`.
    pub fn q_polynomials(&self, j: usize) -> Result<(UPoly<F>, Option<UPoly<F>>)> {
        if j == 0 || j > self.r + 1 {
            return Err(Error::OutOfRange { k: j, n: self.r + 1 });
        }
        let rows = self.last_rows(j);
        if j == self.r + 1 {
            let v = self.vandermonde_minor(&rows);
            let inv = F::one().checked_div(&v).ok_or(Error::SingularVandermonde)?;
            return Ok((self.minor(&rows).scale(&inv), None));
        }
        let plus = self.normalized_minor(&rows, j)?;
        let mut minus_rows = rows.clone();
        minus_rows[0] = self.r - j;
        let minus = self.normalized_minor(&minus_rows, j)?;
        Ok((plus, Some(minus)))
    }

    /// `Q^+_0 = 1, Q^+_1, ..., Q^+_r, Q^+_{r+1} = 1`.
    pub fn q_plus_chain(&self) -> Result<Vec<UPoly<F>>> {
        let mut out = vec![UPoly::one()];
        for j in 1..=self.r {
            out.push(self.q_polynomials(j)?.0);
        }
        out.push(UPoly::one());
        Ok(out)
    }

    /// One residual per QQ equation `j = 1..r`.
    pub fn qq_residual(&self) -> Result<Vec<QqResidual<F>>> {
        let chain = self.q_plus_chain()?;
        let mut out = Vec::with_capacity(self.r);
        for j in 1..=self.r {
            let (plus, minus) = self.q_polynomials(j)?;
            let minus = minus.expect("j <= r");
            let a = self.r - j;
            let b = self.r + 1 - j;
            let q = &self.q;
            let lhs = &(&plus.dilate(q) * &minus).scale(&self.xi[b]) - &(&plus * &minus.dilate(q)).scale(&self.xi[a]);
            let rhs = &(&self.lambdas[j - 1] * &chain[j - 1].dilate(q)) * &chain[j + 1];
            let constant = lhs
                .leading()
                .checked_div(&rhs.leading())
                .unwrap_or_else(F::zero);
            let diff = &lhs - &rhs.scale(&constant);
            let norm = lhs.leading();
            let residual = match F::one().checked_div(&norm) {
                Some(inv) => diff.scale(&inv),
                None => diff,
            };
            let degree_match = lhs.degree() == rhs.degree();
            out.push(QqResidual {
                j,
                residual,
                constant,
                twist_gap: self.xi[b].clone() - self.xi[a].clone(),
                degree_match,
            });
        }
        Ok(out)
    }

    /// Checks `D_k = beta_k W_k V_k` with monic `V_k`, for `0 <= k <= r + 1`.
    pub fn wronskian_factorization_check(&self, k: usize) -> Result<WronskianReport<F>> {
        if k > self.r + 1 {
            return Err(Error::OutOfRange { k, n: self.r + 1 });
        }
        if k == 0 {
            return Ok(WronskianReport {
                k,
                beta: F::one(),
                v: UPoly::one(),
                q_plus_mismatch: None,
            });
        }
        let d = self.flag_determinant(k)?;
        let (quot, rem) = d.div_rem(&self.wronskians[k]).ok_or(Error::NotDivisible { k })?;
        if !tolerance_zero(&rem, d.max_norm(), 1e-9) {
            return Err(Error::NotDivisible { k });
        }
        let beta = quot.leading();
        let v = quot.monic().ok_or(Error::NotDivisible { k })?;
        let q_plus_mismatch = if k <= self.r {
            let qp = self.q_polynomials(k)?.0;
            let qp = qp.monic().ok_or(Error::NotDivisible { k })?;
            Some((&qp - &v).max_norm() / qp.max_norm().max(f64::MIN_POSITIVE))
        } else {
            None
        };
        Ok(WronskianReport {
            k,
            beta,
            v,
            q_plus_mismatch,
        })
    }

    /// `s -> f s`, with the Wronskians picking up `prod_{j<k} f(q^j z)`.
    pub fn gauge_transform(&self, f: &UPoly<F>) -> Self {
        let mut out = self.clone();
        out.sections = self.sections.iter().map(|s| s * f).collect();
        for k in 1..=self.r + 1 {
            let mut g = UPoly::one();
            for j in 0..k {
                g = &g * &f.dilate(&self.q.pow(j as u32));
            }
            out.wronskians[k] = &self.wronskians[k] * &g;
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct QqResidual<F: Field> {
    pub j: usize,
    /// `lhs - c rhs`, scaled so that `lhs` is monic.
    pub residual: UPoly<F>,
    /// The fitted per-equation constant `c`.
    pub constant: F,
    /// `xi_b - xi_a` for the two twists in the equation.
    pub twist_gap: F,
    pub degree_match: bool,
}

impl<F: Field> QqResidual<F> {
    pub fn max_coefficient(&self) -> f64 {
        self.residual.max_norm()
    }
}

#[derive(Clone, Debug)]
pub struct WronskianReport<F: Field> {
    pub k: usize,
    pub beta: F,
    pub v: UPoly<F>,
    /// Relative distance between `V_k` and monic `Q^+_k`.
    pub q_plus_mismatch: Option<f64>,
}

// ---------------------------------------------------------------- Bethe

#[derive(Clone, Debug)]
pub struct BetheConfiguration {
    /// Roots of `Q_1..Q_r`.
    pub roots: Vec<Vec<C64>>,
    /// `xi_1..xi_{r+1}`.
    pub xi: Vec<C64>,
    /// `Lambda_1..Lambda_r`.
    pub lambdas: Vec<UPoly<C64>>,
}

/// Which form of the Bethe equations to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetheForm {
    /// The equations implied by the QQ-system in the minor conventions above.
    QqImplied,
    /// Twist labels and shifts as in the usual printed form
    /// `Q_i(qs)/Q_i(s/q) xi_i/xi_{i+1} = -Lambda_i(s) Q_{i+1}(qs) Q_{i-1}(s) / (...)`.
    Printed,
}

impl BetheConfiguration {
    pub fn from_oper(data: &QOperData<C64>) -> Result<Self> {
        let chain = data.q_plus_chain()?;
        Ok(BetheConfiguration {
            roots: (1..=data.r).map(|j| roots(&chain[j])).collect(),
            xi: data.xi.clone(),
            lambdas: data.lambdas.clone(),
        })
    }

    pub fn rank(&self) -> usize {
        self.roots.len()
    }

    fn q_poly(&self, i: usize) -> UPoly<C64> {
        if i == 0 || i > self.rank() {
            UPoly::one()
        } else {
            UPoly::from_roots(&self.roots[i - 1])
        }
    }

    fn check_nondegenerate(&self, q: C64) -> Result<()> {
        for node in &self.roots {
            for (k, s) in node.iter().enumerate() {
                for (l, t) in node.iter().enumerate() {
                    if k != l {
                        let scale = s.norm().max(t.norm()).max(1e-300);
                        if (s * q - t).norm() < 1e-12 * scale || (s - t).norm() < 1e-12 * scale {
                            return Err(Error::PoleCollision(k + 1, l + 1));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Pole-free residual per root, relative to the sum of the two term sizes.
    pub fn residuals(&self, q: C64, form: BetheForm) -> Result<Vec<Vec<f64>>> {
        self.check_nondegenerate(q)?;
        let r = self.rank();
        let qinv = q.inv();
        (1..=r)
            .map(|i| {
                let qi = self.q_poly(i);
                let prev = self.q_poly(i - 1);
                let next = self.q_poly(i + 1);
                let lam = &self.lambdas[i - 1];
                Ok(self.roots[i - 1]
                    .par_iter()
                    .map(|&s| {
                        let (t1, t2) = match form {
                            BetheForm::QqImplied => {
                                let (a, b) = (self.xi[r - i], self.xi[r + 1 - i]);
                                (
                                    b * qi.eval(&(q * s)) * lam.eval(&(s * qinv)) * prev.eval(&s) * next.eval(&(s * qinv)),
                                    a * qi.eval(&(s * qinv)) * lam.eval(&s) * prev.eval(&(q * s)) * next.eval(&s),
                                )
                            }
                            BetheForm::Printed => (
                                self.xi[i - 1] * qi.eval(&(q * s)) * lam.eval(&(s * qinv)) * next.eval(&s) * prev.eval(&(s * qinv)),
                                self.xi[i] * qi.eval(&(s * qinv)) * lam.eval(&s) * next.eval(&(q * s)) * prev.eval(&s),
                            ),
                        };
                        let size = t1.norm() + t2.norm();
                        if size == 0.0 {
                            0.0
                        } else {
                            (t1 + t2).norm() / size
                        }
                    })
                    .collect())
            })
            .collect()
    }
}

/// Outcome of running the q-oper pipeline on one tRS momentum vector.
#[derive(Clone, Debug)]
pub struct OperVerification {
    /// Relative distance between `D_{r+1}` and `beta Lambda`.
    pub d_check: f64,
    pub d_beta: C64,
    pub qq_residuals: Vec<f64>,
    pub qq_constants: Vec<C64>,
    pub bethe_residuals: Vec<f64>,
    pub beta_constants: Vec<C64>,
}

impl OperVerification {
    pub fn max_qq(&self) -> f64 {
        self.qq_residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_bethe(&self) -> f64 {
        self.bethe_residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Builds the oper with `s_i = z - p_i` and checks `D_{r+1} ~ Lambda`, the
/// QQ-system and the Bethe equations.
pub fn verify_trs_point(xi: &[C64], p: &[C64], a: &[C64], q: C64) -> Result<OperVerification> {
    let data = QOperData::trs(xi, p, a, q)?;
    let d = data.flag_determinant(data.r + 1)?;
    let lambda = data.lambda();
    let d_beta = d.leading() / lambda.leading();
    let d_check = (&d - &lambda.scale(&d_beta)).max_norm() / d.max_norm();
    let qq = data.qq_residual()?;
    let bethe = if data.r == 0 {
        vec![]
    } else {
        BetheConfiguration::from_oper(&data)?
            .residuals(q, BetheForm::QqImplied)?
            .into_iter()
            .flatten()
            .collect()
    };
    let beta_constants = (1..=data.r + 1)
        .map(|k| data.wronskian_factorization_check(k).map(|w| w.beta))
        .collect::<Result<_>>()?;
    Ok(OperVerification {
        d_check,
        d_beta,
        qq_residuals: qq.iter().map(|x| x.max_coefficient()).collect(),
        qq_constants: qq.iter().map(|x| x.constant).collect(),
        bethe_residuals: bethe,
        beta_constants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qoper_algebra::Rational;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn rank_one_flag_determinant() {
        let s1 = UPoly::new(vec![r(2), r(1)]);
        let s2 = UPoly::new(vec![r(-1), r(3)]);
        let (x1, x2, q) = (r(5), r(7), r(3));
        let data = QOperData::new(vec![s1.clone(), s2.clone()], vec![x1.clone(), x2.clone()], q.clone(), vec![UPoly::one()]).unwrap();
        let d2 = data.flag_determinant(2).unwrap();
        let expect = &(&s1 * &s2.dilate(&q)).scale(&x2) - &(&s2 * &s1.dilate(&q)).scale(&x1);
        assert_eq!(d2, expect);
        let same = QOperData::new(vec![s1.clone(), s1.clone()], vec![x1.clone(), x2.clone()], q.clone(), vec![UPoly::one()]).unwrap();
        assert_eq!(same.flag_determinant(2).unwrap(), (&s1 * &s1.dilate(&q)).scale(&(x2 - x1)));
    }

    #[test]
    fn q_one_gives_vandermonde_times_product() {
        let xi = [c(1.2, 0.1), c(-0.5, 0.7), c(0.3, -0.9)];
        let p = [c(0.4, 0.0), c(-1.1, 0.3), c(0.8, 0.8)];
        let data = QOperData::trs(&xi, &p, &p, c(1.0, 0.0)).unwrap();
        let d = data.flag_determinant(3).unwrap();
        let v = data.vandermonde_minor(&[0, 1, 2]);
        let expect = UPoly::from_roots(&p).scale(&v);
        assert!((&d - &expect).max_norm() < 1e-12);
    }

    #[test]
    fn first_q_polynomial_is_last_section() {
        let xi = [c(1.2, 0.1), c(-0.5, 0.7)];
        let p = [c(0.4, 0.0), c(-1.1, 0.3)];
        let data = QOperData::trs(&xi, &p, &[c(1.0, 0.0), c(2.0, 0.0)], c(0.7, 0.2)).unwrap();
        let (plus, _) = data.q_polynomials(1).unwrap();
        assert!((&plus - &UPoly::linear_root(p[1])).max_norm() < 1e-14);
        // swapping both twists and sections leaves the rank-one Q^+ invariant up to scale
        let swapped = QOperData::trs(&[xi[1], xi[0]], &[p[1], p[0]], &[c(1.0, 0.0), c(2.0, 0.0)], c(0.7, 0.2)).unwrap();
        let (sp, _) = swapped.q_polynomials(1).unwrap();
        assert_eq!(sp.degree(), Some(1));
    }

    #[test]
    fn two_site_toy_bethe() {
        // Lambda = 1, single root: the equation forces xi_1 = q xi_2.
        let q = c(0.6, 0.3);
        let cfg = BetheConfiguration {
            roots: vec![vec![c(0.9, -0.4)]],
            xi: vec![q * c(1.3, 0.2), c(1.3, 0.2)],
            lambdas: vec![UPoly::one()],
        };
        assert!(cfg.residuals(q, BetheForm::QqImplied).unwrap()[0][0] < 1e-15);
        let off = BetheConfiguration {
            xi: vec![c(2.0, 0.0), c(1.3, 0.2)],
            ..cfg
        };
        assert!(off.residuals(q, BetheForm::QqImplied).unwrap()[0][0] > 1e-3);
    }

    #[test]
    fn boundary_wronskians() {
        let xi = [c(1.2, 0.1), c(-0.5, 0.7)];
        let p = [c(0.4, 0.0), c(-1.1, 0.3)];
        let data = QOperData::trs(&xi, &p, &[c(1.0, 0.0), c(2.0, 0.0)], c(0.7, 0.2)).unwrap();
        let w0 = data.wronskian_factorization_check(0).unwrap();
        assert_eq!(w0.v, UPoly::one());
        assert!(data.wronskian_factorization_check(3).is_err());
    }
}
