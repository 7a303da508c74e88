use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qoper_algebra::{parse_rational_function, RationalFunction};
use qoper_core::numeric::C64;
use qoper_core::trs::*;

#[test]
fn single_particle_is_a_pure_shift() {
    let f = TrsFrame::generic(1, "x", "t");
    let h = trs_hamiltonian(&f, 1).unwrap();
    assert_eq!(h.coeff(&[1]), Some(&RationalFunction::one(&f.registry())));
    assert_eq!(h.len(), 1);
}

#[test]
fn two_particles() {
    let f = TrsFrame::generic(2, "xi", "t");
    let reg = f.registry();
    let h1 = trs_hamiltonian(&f, 1).unwrap();
    let c1 = parse_rational_function(&reg, "(t*xi1 - xi2)/(xi1 - xi2)").unwrap();
    let c2 = parse_rational_function(&reg, "(t*xi2 - xi1)/(xi2 - xi1)").unwrap();
    assert_eq!(h1.coeff(&[1, 0]), Some(&c1));
    assert_eq!(h1.coeff(&[0, 1]), Some(&c2));
    let h2 = trs_hamiltonian(&f, 2).unwrap();
    assert_eq!(h2.len(), 1);
    assert_eq!(h2.coeff(&[1, 1]), Some(&RationalFunction::one(&reg)));
    assert!(trs_hamiltonian(&f, 3).is_err());
}

#[test]
fn commuting_families() {
    for n in 2..=3 {
        for frame in [TrsFrame::generic(n, "x", "t"), TrsFrame::magnetic(n), TrsFrame::electric(n)] {
            let r = check_commutativity(&frame).unwrap();
            assert!(r.all_zero(), "{n}: {:?}", r.nonzero_pairs);
            assert_eq!(r.pairs_checked, n * (n - 1) / 2);
        }
    }
}

#[test]
fn a_multiplication_operator_does_not_commute() {
    let f = TrsFrame::generic(2, "x", "t");
    let h1 = trs_hamiltonian(&f, 1).unwrap();
    let x1 = h1.term_like(vec![0, 0], RationalFunction::var(&f.registry(), "x1").unwrap());
    assert!(!h1.commutator(&x1).unwrap().is_zero());
}

#[test]
fn unit_coupling_gives_power_sums() {
    let coords = [C64::new(1.3, 0.2), C64::new(-0.4, 0.9), C64::new(0.7, -1.1)];
    let p = [C64::new(0.5, 0.5), C64::new(2.0, 0.0), C64::new(-1.0, 0.3)];
    let h = hamiltonian_values(&coords, &p, C64::new(1.0, 0.0));
    let e1: C64 = p.iter().sum();
    assert!((h[0] - e1).norm() < 1e-12);
    assert!((h[2] - p[0] * p[1] * p[2]).norm() < 1e-12);
}

#[test]
fn lax_spectrum_matches_hamiltonians() {
    let xi = [C64::new(1.1, 0.3), C64::new(-0.6, 0.8), C64::new(0.4, -1.2)];
    let p = [C64::new(0.9, -0.2), C64::new(1.4, 0.5), C64::new(-0.7, 0.1)];
    let q = C64::new(0.6, 0.3);
    for reading in [LaxReading::Literal, LaxReading::Transposed] {
        assert!(lax_consistency(&xi, &p, q, reading).unwrap() < 1e-10);
    }
    let one = trs_lax(&[C64::new(2.0, 0.0)], &[C64::new(3.0, 1.0)], q, LaxReading::Literal).unwrap();
    assert_eq!(one[(0, 0)], C64::new(3.0, 1.0));
}

#[test]
fn duality_counts_and_residuals() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=3 {
        for s in 0..4 {
            let d = sample_duality_data(&mut rng, n);
            let sol = duality_solve(&d.xi, &d.a, d.q, &SolveOptions { seed: s, ..Default::default() }).unwrap();
            assert_eq!(sol.count(), (1..=n).product::<usize>());
            assert!(sol.max_residual() < 1e-10);
        }
    }
}

#[test]
fn mirror_of_one_particle() {
    let (xi, a, q) = ([C64::new(1.5, 0.2)], [C64::new(0.8, -0.3)], C64::new(0.5, 0.2));
    let opts = SolveOptions::default();
    let mag = duality_solve(&xi, &a, q, &opts).unwrap();
    let r = mirror_check(&mag, &a, &xi, q, &opts).unwrap();
    assert!(r.passed());
    assert!((r.electric.points[0].momenta[0] - xi[0]).norm() < 1e-12);
}

#[test]
fn coincident_twists_are_rejected() {
    let xi = [C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
    let a = [C64::new(0.5, 0.0), C64::new(2.0, 0.0)];
    assert!(duality_solve(&xi, &a, C64::new(0.5, 0.0), &SolveOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Scaling every `a_i` by `s` scales each `e_k` target by `s^k` and each solution by `s`.
    #[test]
    fn solutions_scale_with_singularities(seed in any::<u64>(), s in 0.5f64..2.0, phase in 0.0f64..6.28) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = sample_duality_data(&mut rng, 2);
        let s = C64::from_polar(s, phase);
        let scaled: Vec<C64> = d.a.iter().map(|&x| x * s).collect();
        let opts = SolveOptions::default();
        let base = duality_solve(&d.xi, &d.a, d.q, &opts).unwrap();
        let moved = duality_solve(&d.xi, &scaled, d.q, &opts).unwrap();
        prop_assert_eq!(base.count(), moved.count());
        for pt in &base.points {
            let target: Vec<C64> = pt.momenta.iter().map(|&p| p * s).collect();
            let hit = moved.points.iter().any(|m| {
                m.momenta.iter().zip(&target).all(|(x, y)| (x - y).norm() < 1e-7 * (1.0 + y.norm()))
            });
            prop_assert!(hit);
        }
    }

    #[test]
    fn hamiltonians_are_homogeneous_in_momenta(seed in any::<u64>(), s in 0.3f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = sample_duality_data(&mut rng, 3);
        let p: Vec<C64> = d.a.clone();
        let sp: Vec<C64> = p.iter().map(|&x| x * s).collect();
        let h = hamiltonian_values(&d.xi, &p, d.q);
        let hs = hamiltonian_values(&d.xi, &sp, d.q);
        for k in 0..3 {
            let expect = h[k] * s.powi(k as i32 + 1);
            prop_assert!((hs[k] - expect).norm() < 1e-10 * (1.0 + expect.norm()));
        }
    }
}
