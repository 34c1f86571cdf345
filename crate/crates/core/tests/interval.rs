use growthlab::tower::interval::ceil_root;
use growthlab::tower::{Dyadic, Interval, Round};
use num_bigint::BigInt;
use num_rational::BigRational;

fn f(i: &Interval) -> (f64, f64) {
    i.into()
}

#[test]
fn constants_enclose_known_values() {
    for prec in [64, 128, 512] {
        let (lo, hi) = f(&Interval::ln2(prec));
        assert!(lo <= std::f64::consts::LN_2 + 1e-15 && std::f64::consts::LN_2 - 1e-15 <= hi);
        let (lo, hi) = f(&Interval::pi(prec));
        assert!(lo <= std::f64::consts::PI + 1e-15 && std::f64::consts::PI - 1e-15 <= hi);
        let (lo, hi) = f(&Interval::e(prec));
        assert!(lo <= std::f64::consts::E + 1e-15 && std::f64::consts::E - 1e-15 <= hi);
    }
    let p = Interval::pi(256);
    assert!(p.width(256) < Dyadic::pow2(-250));
}

#[test]
fn exp_ln_round_trip_encloses() {
    for v in [-30i64, -1, 1, 2, 7, 44, 1000] {
        let x = Interval::from_int(v);
        let back = x.exp(128).ln(128);
        assert!(back.contains(&Dyadic::from_int(v)), "{v}: {back:?}");
        assert!(back.width(128) < Dyadic::pow2(-100));
    }
}

#[test]
fn ln_of_large_and_small_values() {
    let big = Interval::point(Dyadic::pow2(300));
    let l = big.ln(128);
    let expect = 300.0 * std::f64::consts::LN_2;
    assert!((l.to_f64_mid() - expect).abs() < 1e-10);
    let small = Interval::point(Dyadic::pow2(-300));
    assert!((small.ln(128).to_f64_mid() + expect).abs() < 1e-10);
}

#[test]
fn expm1_and_ln1p_are_relatively_accurate() {
    let x = Interval::point(Dyadic::pow2(-200));
    let e = x.expm1(128);
    assert!(e.lo >= Dyadic::pow2(-200) && e.hi <= Dyadic::pow2(-200).add(&Dyadic::pow2(-320), 200, Round::Up));
    let l = x.ln1p(128);
    assert!(l.hi <= Dyadic::pow2(-200).add(&Dyadic::pow2(-320), 200, Round::Up) && l.lo >= Dyadic::pow2(-200).sub(&Dyadic::pow2(-320), 200, Round::Down));
    let n = Interval::point(Dyadic::pow2(-5).neg()).ln1p(128);
    let expect = (1.0f64 - 1.0 / 32.0).ln();
    assert!((n.to_f64_mid() - expect).abs() < 1e-15);
}

#[test]
fn ceil_root_is_exact() {
    let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    assert_eq!(ceil_root(&q(10, 1), 2), BigInt::from(4));
    assert_eq!(ceil_root(&q(9, 1), 2), BigInt::from(3));
    assert_eq!(ceil_root(&q(1, 3), 2), BigInt::from(1));
    assert_eq!(ceil_root(&q(28, 1), 3), BigInt::from(4));
    assert_eq!(ceil_root(&q(27, 1), 3), BigInt::from(3));
    assert_eq!(ceil_root(&q(1, 1), 5), BigInt::from(1));
}
