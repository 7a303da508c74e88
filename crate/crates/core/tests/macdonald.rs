use proptest::prelude::*;

use qoper_algebra::{parse_rational_function, RationalFunction};
use qoper_core::macdonald::*;

fn p(parts: &[u32]) -> Partition {
    Partition::new(parts).unwrap()
}

#[test]
fn two_box_row_in_two_variables() {
    let poly = macdonald_oracle(&p(&[2, 0]), 2).unwrap();
    let reg = poly.registry().clone();
    assert_eq!(poly.coeff(&p(&[2, 0])), Some(&RationalFunction::one(&reg)));
    let expect = parse_rational_function(&reg, "(1+q)*(1-h)/(1-q*h)").unwrap();
    assert_eq!(poly.coeff(&p(&[1, 1])), Some(&expect));
}

#[test]
fn gram_schmidt_agrees_with_the_triangular_oracle() {
    for n in 1..=3 {
        for size in 0..=3 {
            for lambda in Partition::all(size, n) {
                assert_eq!(macdonald_gram_schmidt(&lambda, n).unwrap(), macdonald_oracle(&lambda, n).unwrap(), "{lambda}");
            }
        }
    }
}

#[test]
fn h_equal_q_gives_schur() {
    for lambda in Partition::all(3, 3) {
        assert!(schur_specialization_check(&lambda, 3).unwrap(), "{lambda}");
    }
}

#[test]
fn dominance_and_enumeration() {
    assert!(p(&[3, 0, 0]).dominates(&p(&[2, 1, 0])));
    assert!(!p(&[1, 1, 1]).dominates(&p(&[2, 1, 0])));
    assert_eq!(Partition::all(4, 2).len(), 3);
    assert_eq!(Partition::all(4, 3).len(), 4);
    assert!(Partition::new(&[1, 2]).is_err());
}

#[test]
fn locus_directions() {
    let lambda = p(&[2, 1, 0]);
    let printed = truncation_locus(&lambda, LocusConvention::Paper);
    assert_eq!(printed.iter().map(|m| m.to_string()).collect::<Vec<_>>(), ["q^-1*h", "q^-1*h"]);
    let report = eigencheck(&lambda, 3).unwrap();
    assert!(report.locus_for(LocusConvention::resolved()).unwrap().all());
    assert!(!report.locus_for(LocusConvention::Paper).unwrap().all());
    let flat = eigencheck(&p(&[1, 1, 1]), 3).unwrap();
    assert!(flat.locus_for(LocusConvention::Paper).unwrap().all());
}

fn partitions() -> impl Strategy<Value = (Partition, usize)> {
    (1usize..=3, 0u32..=3).prop_flat_map(|(n, size)| {
        let all = Partition::all(size, n);
        (0..all.len()).prop_map(move |i| (all[i].clone(), n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn eigenvectors_of_every_hamiltonian((lambda, n) in partitions()) {
        let r = eigencheck(&lambda, n).unwrap();
        prop_assert!(r.simultaneous());
        prop_assert!(r.eigenvalues_match_formula());
        prop_assert!(r.top_eigenvalue_is_q_power());
        prop_assert_eq!(r.eigenvalues.len(), n);
    }
}
