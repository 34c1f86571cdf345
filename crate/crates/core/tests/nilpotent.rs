use growthlab::group;
use growthlab::nilpotent::{self, NilpotentError, RankVector};
use growthlab::words;
use proptest::prelude::*;

#[test]
fn degree_and_hirsch() {
    let h3: RankVector = "2,1".parse().unwrap();
    assert_eq!(nilpotent::bass_guivarch(&h3), 4);
    assert_eq!(nilpotent::hirsch(&h3), 3);
    assert!(nilpotent::sandwich_holds(&h3));
    let ut4: RankVector = "3,2,1".parse().unwrap();
    assert_eq!(nilpotent::bass_guivarch(&ut4), 10);
    assert_eq!(nilpotent::hirsch(&ut4), 6);
    for d in 0..=100u64 {
        let rv = RankVector::new(vec![d]).unwrap();
        assert_eq!(nilpotent::bass_guivarch(&rv), d);
        assert_eq!(nilpotent::hirsch(&rv), d);
    }
    assert!(matches!("".parse::<RankVector>(), Err(NilpotentError::Parse(_))));
    assert!(matches!(RankVector::new(vec![]), Err(NilpotentError::EmptyRankVector)));
}

#[test]
fn torsion_free_checks_are_advisory() {
    let r = nilpotent::validate_torsion_free(&"1,1".parse().unwrap(), true);
    assert!(!r.valid && r.violations.len() == 1);
    let r = nilpotent::validate_torsion_free(&"2,0,1".parse().unwrap(), false);
    assert!(!r.valid);
    assert!(nilpotent::validate_torsion_free(&"1".parse().unwrap(), false).valid);
    assert!(nilpotent::validate_torsion_free(&"2,1".parse().unwrap(), true).valid);
}

#[test]
fn max_class_values() {
    assert!(matches!(nilpotent::max_class(1), Err(NilpotentError::DegreeTooSmall)));
    assert_eq!(nilpotent::max_class(2).unwrap(), 1);
    assert_eq!(nilpotent::max_class(4).unwrap(), 2);
    assert_eq!(nilpotent::max_class(7).unwrap(), 3);
    for d in 2..200u64 {
        let c = nilpotent::max_class(d).unwrap();
        assert!(c * (c + 1) <= 2 * d - 2 && (c + 1) * (c + 2) > 2 * d - 2);
    }
}

#[test]
fn powers_and_multilinearity() {
    let g = group::builtin("builtin:heisenberg").unwrap();
    let x = g.supplied_generators().to_vec();
    let p = nilpotent::power(&g, &x[0], -3);
    assert!(g.is_identity(&g.compose(&p, &nilpotent::power(&g, &x[0], 3))));
    assert!(g.is_identity(&nilpotent::power(&g, &x[1], 0)));
    assert!(nilpotent::multilinearity_check(&g, &x, &[2, -3]).unwrap());
    assert!(matches!(nilpotent::multilinearity_check(&g, &x, &[2]), Err(NilpotentError::ArityMismatch { .. })));
    // The infinite dihedral group is not nilpotent: [a^2, b] = 1 but [a, b]^2 != 1.
    let d = group::builtin("builtin:dinf").unwrap();
    let y = d.supplied_generators().to_vec();
    assert!(!nilpotent::multilinearity_check(&d, &y, &[2, 1]).unwrap());
}

#[test]
fn commutator_power_decomposition() {
    assert_eq!(nilpotent::commutator_power_decomposition(8, 2, 3), Some(vec![vec![2, 2, 2]]));
    assert_eq!(nilpotent::commutator_power_decomposition(9, 2, 3), None);
    assert_eq!(nilpotent::commutator_power_decomposition(0, 2, 3), None);
    let g = group::builtin("builtin:ut:4").unwrap();
    let x = g.supplied_generators().to_vec();
    for k in 1..=27 {
        let r = nilpotent::commutator_power_check(&g, &x, k, 3).unwrap().unwrap();
        assert!(r.terms.len() <= 3, "k={k}");
        assert!(r.within_bound && r.identity_holds, "k={k}: {r:?}");
    }
    let sub = nilpotent::substitute_powers(&words::simple_commutator_word(2), &[2, 3]);
    assert_eq!(sub.to_string(), "X1 X1 X2 X2 X2 x1 x1 x2 x2 x2");
}

proptest! {
    #[test]
    fn degree_bounds_class(r in prop::collection::vec(1u64..5, 1..6), r1 in 2u64..6) {
        let mut r = r;
        r[0] = r1;
        let rv = RankVector::new(r).unwrap();
        prop_assert!(nilpotent::validate_torsion_free(&rv, true).valid);
        let c = rv.class() as u64;
        prop_assert!(nilpotent::bass_guivarch(&rv) > c * (c + 1) / 2);
        prop_assert!(nilpotent::sandwich_holds(&rv));
    }

    #[test]
    fn multilinear_in_class_two(a in -5i64..=5, b in -5i64..=5) {
        let g = group::builtin("builtin:ut:3").unwrap();
        let x = g.supplied_generators().to_vec();
        prop_assert!(nilpotent::multilinearity_check(&g, &x, &[a, b]).unwrap());
    }

    #[test]
    fn multilinear_in_class_three(a in -5i64..=5, b in -5i64..=5, c in -5i64..=5) {
        let g = group::builtin("builtin:ut:4").unwrap();
        let x = g.supplied_generators().to_vec();
        prop_assert!(nilpotent::multilinearity_check(&g, &x, &[a, b, c]).unwrap());
    }
}
