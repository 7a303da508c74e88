use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qoper_algebra::{rat, ratio, Rational};
use qoper_core::numeric::{UPoly, C64};
use qoper_core::qoper::*;
use qoper_core::trs::{duality_solve, sample_duality_data, SolveOptions};

fn r(n: i64, d: i64) -> Rational {
    ratio(n, d)
}

#[test]
fn repeated_section_factors_out() {
    let s = UPoly::new(vec![r(-3, 2), rat(1)]);
    let (x1, x2, q) = (rat(2), rat(5), r(1, 3));
    let data = QOperData::new(vec![s.clone(), s.clone()], vec![x1.clone(), x2.clone()], q.clone(), vec![UPoly::one()]).unwrap();
    let d2 = data.flag_determinant(2).unwrap();
    let expect = (&s * &s.dilate(&q)).scale(&(x2 - x1));
    assert_eq!(d2, expect);
}

#[test]
fn pipeline_on_duality_solutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..=3 {
        let d = sample_duality_data(&mut rng, n);
        let sol = duality_solve(&d.xi, &d.a, d.q, &SolveOptions::default()).unwrap();
        for pt in &sol.points {
            let v = verify_trs_point(&d.xi, &pt.momenta, &d.a, d.q).unwrap();
            assert!(v.d_check < 1e-9, "D ~ Lambda {}", v.d_check);
            assert!(v.max_qq() < 1e-10, "QQ {}", v.max_qq());
            assert!(v.max_bethe() < 1e-9, "Bethe {}", v.max_bethe());
        }
    }
}

#[test]
fn perturbed_roots_break_bethe() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let d = sample_duality_data(&mut rng, 2);
    let sol = duality_solve(&d.xi, &d.a, d.q, &SolveOptions::default()).unwrap();
    let data = QOperData::trs(&d.xi, &sol.points[0].momenta, &d.a, d.q).unwrap();
    let mut config = BetheConfiguration::from_oper(&data).unwrap();
    assert!(config.residuals(d.q, BetheForm::QqImplied).unwrap().iter().flatten().all(|&x| x < 1e-9));
    config.roots[0][0] *= 1.01;
    assert!(config.residuals(d.q, BetheForm::QqImplied).unwrap().iter().flatten().any(|&x| x > 1e-4));
}

#[test]
fn random_sections_are_not_opers() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut c = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let sections = vec![UPoly::new(vec![c(), c(), C64::new(1.0, 0.0)]), UPoly::new(vec![c(), C64::new(1.0, 0.0)])];
    let lambda = UPoly::new(vec![c(), c(), C64::new(1.0, 0.0)]);
    let data = QOperData::new(sections, vec![c(), c()], c(), vec![lambda]).unwrap();
    let worst = data.qq_residual().unwrap().iter().map(|x| x.max_coefficient()).fold(0.0, f64::max);
    assert!(worst > 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `s -> f s` multiplies `D_k` by `prod_{j<k} f(q^j z)` and keeps the monic parts.
    #[test]
    fn gauge_covariance(p in proptest::collection::vec(-9i64..9, 3), xi in proptest::collection::vec(1i64..20, 3), root in -7i64..7, qd in 2i64..6) {
        let xi: Vec<Rational> = xi.iter().enumerate().map(|(i, &x)| rat(x * 3 + i as i64)).collect();
        let p: Vec<Rational> = p.iter().map(|&x| r(x, 2)).collect();
        let a = vec![rat(1), rat(2), rat(-3)];
        let q = r(1, qd);
        let data = QOperData::trs(&xi, &p, &a, q.clone()).unwrap();
        let f = UPoly::new(vec![r(root, 3), rat(1)]);
        let gauged = data.gauge_transform(&f);
        for k in 1..=2 {
            let mut g = UPoly::one();
            for j in 0..k {
                g = &g * &f.dilate(&num_traits::Pow::pow(&q, j as u32));
            }
            prop_assert_eq!(gauged.flag_determinant(k).unwrap(), &data.flag_determinant(k).unwrap() * &g);
            if let (Ok(before), Ok(after)) = (data.wronskian_factorization_check(k), gauged.wronskian_factorization_check(k)) {
                prop_assert_eq!(before.v, after.v);
            }
        }
    }
}
