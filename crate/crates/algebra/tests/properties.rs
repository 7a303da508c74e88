use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qoper_algebra::{
    q_pochhammer, random, rat, theta_expand, LaurentPoly, RationalFunction, Registry, ShiftOperator,
    TruncatedSeries,
};

fn five_vars() -> Registry {
    Registry::new(&["a", "b", "c", "d", "e"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), nvars in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reg = Registry::new(&five_vars().names()[..nvars]);
        let a = random::laurent(&mut rng, &reg, 4, 4);
        let b = random::laurent(&mut rng, &reg, 4, 4);
        let c = random::laurent(&mut rng, &reg, 4, 4);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn operator_composition_is_associative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reg = Registry::new(&["x1", "x2", "q"]);
        let coords = vec!["x1".to_string(), "x2".to_string()];
        let a = random::operator(&mut rng, &coords, "q", &reg, 3);
        let b = random::operator(&mut rng, &coords, "q", &reg, 3);
        let c = random::operator(&mut rng, &coords, "q", &reg, 3);
        let lhs = a.compose(&b).unwrap().compose(&c).unwrap();
        let rhs = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn apply_is_an_algebra_action(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reg = Registry::new(&["x1", "x2", "q"]);
        let coords = vec!["x1".to_string(), "x2".to_string()];
        let a = random::operator(&mut rng, &coords, "q", &reg, 3);
        let b = random::operator(&mut rng, &coords, "q", &reg, 3);
        let f = random::rational_function(&mut rng, &reg);
        let lhs = a.compose(&b).unwrap().apply(&f).unwrap();
        let rhs = a.apply(&b.apply(&f).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pochhammer_recursion(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reg = Registry::new(&["x", "y", "q"]);
        let x = RationalFunction::from(random::monomial(&mut rng, &reg));
        let q = RationalFunction::var(&reg, "q").unwrap();
        let one = RationalFunction::one(&reg);
        for d in -5..=5 {
            let lhs = q_pochhammer(&x, "q", d);
            let prev = q_pochhammer(&x, "q", d - 1);
            if let (Ok(lhs), Ok(prev)) = (lhs, prev) {
                let factor = &one - &(&x * &q.pow(d - 1).unwrap());
                prop_assert_eq!(lhs, &factor * &prev);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn series_inversion_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reg = Registry::new(&["x1", "x2"]);
        let s = random::invertible_series(&mut rng, &["p", "w"], &[2, 2], &reg);
        let prod = &s * &s.invert().unwrap();
        let one = TruncatedSeries::one(&["p", "w"], &[2, 2], &reg);
        prop_assert!((&prod - &one).is_zero());
    }

    #[test]
    fn theta_quasi_periodicity(seed in any::<u64>(), cap in 0u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reg = Registry::new(&["x", "y"]);
        let x = RationalFunction::from(random::monomial(&mut rng, &reg));
        let xinv = x.inv().unwrap();
        // theta(p x) built directly from its product: (1 - x p^{k+1}) and (1 - p^k / x).
        let one = TruncatedSeries::one(&["p"], &[cap], &reg);
        let mut lhs = one.clone();
        for k in 0..=cap {
            lhs = &lhs * &(&one - &one.monomial_like(vec![k + 1], x.clone()));
            lhs = &lhs * &(&one - &one.monomial_like(vec![k], xinv.clone()));
        }
        let rhs = theta_expand(&x, "p", cap).unwrap().scale(&-xinv);
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn identity_series_inverts_to_itself() {
    let reg = Registry::new(&["x"]);
    let one = TruncatedSeries::one(&["w"], &[3], &reg);
    assert_eq!(one.invert().unwrap(), one);
}

#[test]
fn commutator_vanishes_iff_action_vanishes_on_monomials() {
    let reg = Registry::new(&["x1", "x2", "q", "t"]);
    let coords = vec!["x1".to_string(), "x2".to_string()];
    let parse = |s: &str| qoper_algebra::parse_rational_function(&reg, s).unwrap();
    let h1 = {
        let mut op = ShiftOperator::zero(&coords, "q");
        op.add_term(vec![1, 0], parse("(t*x1 - x2)/(x1 - x2)"));
        op.add_term(vec![0, 1], parse("(t*x2 - x1)/(x2 - x1)"));
        op
    };
    let h2 = ShiftOperator::term(&coords, "q", vec![1, 1], RationalFunction::one(&reg));
    let x1 = ShiftOperator::term(&coords, "q", vec![0, 0], parse("x1"));
    let monomials: Vec<RationalFunction> = (0..=3)
        .flat_map(|i| (0..=3 - i).map(move |j| (i, j)))
        .map(|(i, j)| RationalFunction::from(LaurentPoly::monomial(&reg, vec![i, j, 0, 0], rat(1))))
        .collect();
    let zero = h1.commutator(&h2).unwrap();
    assert!(zero.is_zero());
    assert!(monomials.iter().all(|m| zero.apply(m).unwrap().is_zero()));
    let nonzero = h1.commutator(&x1).unwrap();
    assert!(!nonzero.is_zero());
    assert!(monomials.iter().any(|m| !nonzero.apply(m).unwrap().is_zero()));
}
