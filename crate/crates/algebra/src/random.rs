//! Seeded random instances for property checks.

use rand::Rng;

use crate::laurent::LaurentPoly;
use crate::ratfunc::RationalFunction;
use crate::registry::Registry;
use crate::series::TruncatedSeries;
use crate::shift::ShiftOperator;
use crate::{ratio, Rational};

fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let n = rng.gen_range(-9..=9);
        if n != 0 {
            return ratio(n, rng.gen_range(1..=4));
        }
    }
}

/// Up to `max_terms` terms with exponents in `[-1, max_deg]`, total degree at most `max_deg`.
pub fn laurent<R: Rng>(rng: &mut R, reg: &Registry, max_terms: usize, max_deg: i32) -> LaurentPoly {
    let n = rng.gen_range(1..=max_terms);
    let terms = (0..n).map(|_| {
        let mut e: Vec<i32> = (0..reg.len()).map(|_| rng.gen_range(-1..=max_deg)).collect();
        while e.iter().sum::<i32>() > max_deg {
            let i = rng.gen_range(0..e.len());
            if e[i] > -1 {
                e[i] -= 1;
            }
        }
        (e, small_rational(rng))
    });
    LaurentPoly::from_terms(reg, terms.collect::<Vec<_>>())
}

/// A nonzero monomial `c x^e` with exponents in `[-2, 2]`.
pub fn monomial<R: Rng>(rng: &mut R, reg: &Registry) -> LaurentPoly {
    let e = (0..reg.len()).map(|_| rng.gen_range(-2..=2)).collect();
    LaurentPoly::monomial(reg, e, small_rational(rng))
}

/// A ratio of two small random polynomials with nonzero denominator.
pub fn rational_function<R: Rng>(rng: &mut R, reg: &Registry) -> RationalFunction {
    loop {
        let n = laurent(rng, reg, 3, 2);
        let d = laurent(rng, reg, 2, 1);
        if let Ok(f) = RationalFunction::new(n, d) {
            return f;
        }
    }
}

/// A series with nonzero constant term.
pub fn invertible_series<R: Rng>(rng: &mut R, small: &[&str], caps: &[u32], reg: &Registry) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero(small, caps, reg);
    s.insert(vec![0; caps.len()], RationalFunction::from(laurent(rng, reg, 2, 1)));
    while s.constant_term().is_zero() {
        s.insert(vec![0; caps.len()], RationalFunction::from(laurent(rng, reg, 2, 1)));
    }
    for _ in 0..rng.gen_range(1..=4) {
        let d: Vec<u32> = caps.iter().map(|&c| rng.gen_range(0..=c)).collect();
        if d.iter().any(|&x| x > 0) {
            s.insert(d, RationalFunction::from(laurent(rng, reg, 2, 1)));
        }
    }
    s
}

/// Up to `max_terms` terms with shifts in `[-1, 1]` and polynomial coefficients.
pub fn operator<R: Rng>(
    rng: &mut R,
    coords: &[String],
    q: &str,
    reg: &Registry,
    max_terms: usize,
) -> ShiftOperator<RationalFunction> {
    let mut op = ShiftOperator::zero(coords, q);
    for _ in 0..rng.gen_range(1..=max_terms) {
        let n = (0..coords.len()).map(|_| rng.gen_range(-1..=1)).collect();
        op.add_term(n, RationalFunction::from(laurent(rng, reg, 2, 2)));
    }
    op
}
