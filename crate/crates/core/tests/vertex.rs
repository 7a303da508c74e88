use qoper_algebra::RationalFunction;
use qoper_core::macdonald::{LocusConvention, Partition};
use qoper_core::vertex::*;

#[test]
fn zero_caps_give_unit_series() {
    for fp in FlagFixedPoint::all(2) {
        let s = vertex_coefficients(&fp, &[0]).unwrap();
        assert_eq!(s.coeff(&[0]), RationalFunction::one(&s.coeff(&[0]).registry()));
    }
}

#[test]
fn flag_fixed_points() {
    assert_eq!(FlagFixedPoint::all(2).len(), 2);
    assert_eq!(FlagFixedPoint::all(3).len(), 6);
    assert!(FlagFixedPoint::new(vec![vec![1], vec![2, 3]]).is_err());
    assert_eq!(FlagFixedPoint::identity(3).subset(1), &[0, 1]);
}

#[test]
fn degree_bounds() {
    assert_eq!(degree_bound(&Partition::new(&[2, 1, 0]).unwrap()), [2, 2]);
    assert_eq!(degree_bound(&Partition::new(&[3, 0]).unwrap()), [3]);
    assert_eq!(degree_bound(&Partition::new(&[1, 1]).unwrap()), [0]);
}

#[test]
fn unique_resolution_in_two_variables() {
    let r = resolve_conventions().unwrap();
    let (conv, fp) = r.unique().expect("one convention matches");
    assert_eq!(*conv, LocusConvention::HbarInverted);
    assert_eq!(fp.to_string(), "({1},{1,2})");
}

#[test]
fn truncation_reproduces_macdonald_in_two_variables() {
    for size in 0..=3 {
        for lambda in Partition::all(size, 2) {
            let r = truncation_check(&lambda, 2, 3, LocusConvention::resolved()).unwrap();
            assert!(r.symmetric && r.matches_oracle, "{lambda}");
        }
    }
    let two = truncation_check(&Partition::new(&[2, 0]).unwrap(), 2, 3, LocusConvention::resolved()).unwrap();
    assert_eq!(two.degree_bound, [2]);
}

#[test]
fn three_variables_do_not_terminate() {
    let r = truncation_check(&Partition::new(&[1, 0, 0]).unwrap(), 3, 2, LocusConvention::resolved());
    assert!(!matches!(r, Ok(ref x) if x.matches_oracle));
}

#[test]
fn eigen_residual_vanishes() {
    let r = eigen_residual(2, 3).unwrap();
    assert!(r.vanishes(), "{:?}", r.lowest_orders());
    assert!(r.fit.is_some());
}
