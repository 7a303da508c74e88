use proptest::prelude::*;

use qoper_algebra::RationalFunction;
use qoper_core::dell::*;

#[test]
fn top_ers_hamiltonian_is_the_total_shift() {
    for n in 2..=3 {
        let h = ers_hamiltonian(n, n, 2).unwrap();
        let keys: Vec<_> = h.terms().map(|(k, _)| k.clone()).collect();
        assert_eq!(keys, [vec![1; n]]);
        let c = h.coeff(&vec![1; n]).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c.constant_term().is_one());
    }
}

#[test]
fn degeneration_in_two_variables() {
    let r = degeneration_check(2, 1, 1).unwrap();
    assert!(r.passed());
    assert!(!r.matches_without_rescaling);
    assert!(r.ers_to_trs.iter().all(|m| m.matches));
    assert_eq!(r.dell_to_ers[0].factor.as_ref().map(RationalFunction::to_string).as_deref(), Some("-1"));
}

#[test]
fn certificate_and_negative_control() {
    let good = dell_commutativity_certificate(&DellModel::new(2, 1, 1).unwrap()).unwrap();
    assert!(good.passed());
    assert_eq!(good.max_verified_order(), [1, 1]);
    let bad = dell_commutativity_certificate(&DellModel::new(3, 1, 0).unwrap().with_theta(ThetaVariant::Corrupted)).unwrap();
    assert!(!bad.passed());
    assert_eq!(bad.first_failure(), Some([1, 0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn verdict_does_not_depend_on_the_sample(seed in any::<u64>(), corrupted in any::<bool>()) {
        let theta = if corrupted { ThetaVariant::Corrupted } else { ThetaVariant::Full };
        let model = DellModel::new(3, 1, 0).unwrap().with_theta(theta);
        let c = dell_commutativity_certificate_with(&model, CertificateMethod::Pointwise { points: 1, seed }).unwrap();
        prop_assert_eq!(c.passed(), !corrupted);
    }
}
