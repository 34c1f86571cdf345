use growthlab::group;
use growthlab::words::{self, Word, WordError};
use num_bigint::BigInt;
use proptest::prelude::*;

#[test]
fn simple_commutators() {
    assert_eq!(words::simple_commutator_word(1).to_string(), "x1");
    assert_eq!(words::simple_commutator_word(2).to_string(), "X1 X2 x1 x2");
    let w3 = words::simple_commutator_word(3);
    assert_eq!(w3.to_string(), "X2 X1 x2 x1 X3 X1 X2 x1 x2 x3");
    assert_eq!(w3.rank(), 3);
    assert_eq!(words::lambda(1), BigInt::from(1));
    assert_eq!(words::lambda(4), BigInt::from(22));
}

#[test]
fn commutator_lengths_up_to_thirty() {
    for k in 1..=30u32 {
        let lam = words::lambda(k);
        assert!(lam <= (BigInt::from(1) << (k - 1)) * k);
        if k <= 20 {
            assert_eq!(BigInt::from(words::simple_commutator_word(k as usize).len()), lam);
        }
    }
}

#[test]
fn parse_and_reduce() {
    let w: Word = "x1 x2 X2 X1 x3".parse().unwrap();
    assert_eq!(w.len(), 5);
    assert_eq!(w.reduce().to_string(), "x3");
    assert_eq!(w.inverse().to_string(), "X3 x1 x2 X2 X1");
    assert!("".parse::<Word>().unwrap().is_empty());
    assert!(matches!("x0".parse::<Word>(), Err(WordError::Parse(_))));
    assert!(matches!("y1".parse::<Word>(), Err(WordError::Parse(_))));
}

#[test]
fn evaluation_checks_indices() {
    let g = group::builtin("builtin:zd:2").unwrap();
    let x = g.supplied_generators().to_vec();
    let w: Word = "x3".parse().unwrap();
    assert!(matches!(words::evaluate_word(&g, &w, &x), Err(WordError::IndexOutOfRange(3))));
    let c = words::simple_commutator_word(2);
    assert!(g.is_identity(&words::evaluate_word(&g, &c, &x).unwrap()));
}

fn arb_word(rank: i32) -> impl Strategy<Value = Word> {
    prop::collection::vec((1..=rank, any::<bool>()), 0..=20)
        .prop_map(|v| Word(v.into_iter().map(|(i, s)| if s { i } else { -i }).collect()))
}

proptest! {
    #[test]
    fn reduction_is_idempotent(w in arb_word(3)) {
        let r = w.reduce();
        prop_assert_eq!(r.reduce(), r.clone());
        prop_assert!(r.len() <= w.len());
        prop_assert_eq!(w.len() % 2, r.len() % 2);
        prop_assert!(w.concat(&w.inverse()).reduce().is_empty());
    }

    #[test]
    fn evaluation_respects_reduction(which in 0usize..6, w in arb_word(2)) {
        let name = ["builtin:zd:2", "builtin:heisenberg", "builtin:ut:3", "builtin:ut:4", "builtin:dinf", "builtin:zd:3"][which];
        let g = group::builtin(name).unwrap();
        let x = g.supplied_generators().to_vec();
        let a = words::evaluate_word(&g, &w, &x).unwrap();
        let b = words::evaluate_word(&g, &w.reduce(), &x).unwrap();
        prop_assert_eq!(g.key(&a), g.key(&b));
        let inv = words::evaluate_word(&g, &w.inverse(), &x).unwrap();
        prop_assert!(g.is_identity(&g.compose(&a, &inv)));
    }

    #[test]
    fn text_round_trip(w in arb_word(9)) {
        prop_assert_eq!(w.to_string().parse::<Word>().unwrap(), w);
    }
}
