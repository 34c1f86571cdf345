mod common;

use common::Oracle;
use growthlab::bounds::{self, BranchChoice, EpsBranch, Status};
use growthlab::group;
use growthlab::tower::{certify, Cmp, Expr, DEFAULT_PREC};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const BUDGET: usize = 10_000_000;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn closed_forms() {
    assert_eq!(bounds::minkowski_bound(3), BigInt::from(720));
    assert_eq!(bounds::nilp_lower_bound(2, 4), q(1, 1));
    assert_eq!(bounds::nilp_lower_bound(4, 2), BigRational::new(16.into(), BigInt::from(1) << 16));
    assert_eq!(bounds::vnilp_lower_bound(1, 1, 16), q(16, 8 * 2));
    assert_eq!(bounds::deg_at_least_bound(4, 1), BigRational::new(1.into(), BigInt::from(1) << 49));
    assert_eq!(bounds::vt_lower_bound(1, 3), q(3, 8 * 2 * 2));
}

#[test]
fn measured_profiles_satisfy_lower_bounds() {
    // (group, degree, Hirsch length, radius)
    for (name, d, h, r) in [
        ("builtin:zd:1", 1, 1, 40),
        ("builtin:zd:2", 2, 2, 20),
        ("builtin:zd:3", 3, 3, 12),
        ("builtin:zd:4", 4, 4, 8),
        ("builtin:heisenberg", 4, 3, 10),
        ("builtin:ut:4", 10, 6, 6),
        ("builtin:dinf", 1, 1, 20),
    ] {
        let g = group::builtin(name).unwrap();
        let p = group::ball_profile(&g, r, BUDGET).unwrap();
        let mut reports = bounds::check_lower_bound("vnilp", &p, &[], |n| bounds::vnilp_lower_bound(d, h, n));
        reports.extend(bounds::check_lower_bound("vt", &p, &[], |n| bounds::vt_lower_bound(d, n)));
        if !name.contains("dinf") {
            reports.extend(bounds::check_lower_bound("nilp", &p, &[], |n| bounds::nilp_lower_bound(d, n)));
        }
        assert_eq!(reports.len() % r, 0);
        assert!(reports.iter().all(|x| x.status == Status::Satisfied), "{name}");
    }
}

#[test]
fn violated_bounds_are_reported() {
    let g = group::builtin("builtin:zd:1").unwrap();
    let p = group::ball_profile(&g, 5, BUDGET).unwrap();
    let r = bounds::check_lower_bound("square", &p, &[("d", "2".into())], |n| BigRational::from_integer((n * n).into()));
    assert_eq!(r[0].status, Status::Satisfied);
    assert_eq!(r[4].status, Status::Violated);
    assert_eq!(r[4].params["n"], "5");
    assert_eq!(r[4].measured.as_deref(), Some("11"));
}

#[test]
fn linear_growth_and_finiteness() {
    let p = group::ball_profile(&group::builtin("builtin:zd:1").unwrap(), 10, BUDGET).unwrap();
    assert_eq!(bounds::linear_growth_criterion(&p), Some((2, 2)));
    let p = group::ball_profile(&group::builtin("builtin:zd:2").unwrap(), 10, BUDGET).unwrap();
    assert_eq!(bounds::linear_growth_criterion(&p), None);
    assert!(bounds::finiteness_flags(&p).virtually_cyclic_at.is_empty());
    let p = group::ball_profile(&group::builtin("builtin:cyclic:6").unwrap(), 8, BUDGET).unwrap();
    let f = bounds::finiteness_flags(&p);
    assert_eq!(f.finite_at, vec![3, 4, 5, 6, 7, 8]);
    assert!(f.exhausted);
}

#[test]
fn measured_constant() {
    let p = group::ball_profile(&group::builtin("builtin:zd:1").unwrap(), 10, BUDGET).unwrap();
    assert_eq!(bounds::measured_growth_constant(&p, 1), q(21, 10));
}

#[test]
fn epsilon_branches() {
    let r = bounds::epsilon_d(1, 2);
    assert_eq!(r.branch, BranchChoice::First);
    for d in [1, 2, 5] {
        let r = bounds::epsilon_d(d, 100);
        assert_eq!(r.branch, BranchChoice::Second, "d={d}");
        assert!(r.value.as_ref().unwrap().is_recip());
    }
}

#[test]
fn epsilon_scaled_by_threshold_power_is_at_most_one() {
    // At n = exp(exp(C d^C)) the second branch gives exactly 1, so only the first branch needs a comparison.
    for c in [2u64, 3, 100] {
        for d in 1..=3u64 {
            let cert = certify(&bounds::epsilon_first_expr(d, c), &bounds::epsilon_second_expr(d, c), DEFAULT_PREC);
            assert!(cert.cmp.is_decided(), "d={d} C={c}");
            let r = bounds::epsilon_d(d, c);
            if r.branch == BranchChoice::First {
                let dc = BigInt::from(c) * BigInt::from(d).pow(c as u32);
                let n_d = (Expr::int(d as i64) * Expr::big(dc).exp()).exp();
                let prod = bounds::epsilon_expr(d, c, EpsBranch::Min, r.branch) * n_d;
                assert_eq!(certify(&prod, &Expr::int(1), DEFAULT_PREC).cmp, Cmp::Less, "d={d} C={c}");
            }
        }
    }
}

#[test]
fn return_probability_bound_value() {
    // 8 · 2^{1/2} / (2 e^{1/2}) = 4 sqrt(2/e)
    let e = bounds::return_prob_bound(1, 2, 1, Expr::int(2));
    let v = e.eval(DEFAULT_PREC).unwrap();
    let mut o = Oracle::new();
    let x = o.eval(&(Expr::int(4) * (Expr::int(2) / Expr::E).sqrt())).unwrap();
    assert_eq!(o.encloses(&v, &x), Some(true));
    assert!(v.to_string().starts_with("E^0[3.43105553984"));
}

#[test]
fn isoperimetric_forms() {
    let b = bounds::iso_bounds(2, 25, &q(1, 1));
    assert_eq!(b.root_ceiling, "8");
    assert_eq!(b.csc, "25/16");
    assert!(b.power_lower.starts_with("0.62499999"));
    let b = bounds::iso_bounds(3, 1000, &q(2, 1));
    assert_eq!(b.root_ceiling, "10");
    assert_eq!(b.csc, "50");
}

#[test]
fn retry_doubles_until_decided() {
    let (c, p) = bounds::decide_with_retry(128, |p| Some(if p >= 1024 { Cmp::Less } else { Cmp::Undecided }));
    assert_eq!((c, p), (Cmp::Less, 1024));
    let (c, _) = bounds::decide_with_retry(128, |_| None);
    assert_eq!(c, Cmp::Undecided);
}

proptest! {
    #[test]
    fn bounds_at_one_are_at_most_one(d in 1u64..12, h in 1u64..12) {
        let one = q(1, 1);
        prop_assert!(bounds::nilp_lower_bound(d, 1) <= one);
        prop_assert!(bounds::vnilp_lower_bound(d, h, 1) <= one);
        prop_assert!(bounds::deg_at_least_bound(d, 1) <= one);
        prop_assert!(bounds::vt_lower_bound(d, 1) <= one);
    }

    #[test]
    fn csc_form_never_exceeds_power_form_scale(d in 1u64..5, a in 1u64..5000, cn in 1i64..20, cd in 1i64..20) {
        // a / (2 ceil((2a/c)^{1/d})) <= a / (2 (2a/c)^{1/d}) and the ceiling is the least integer above the root.
        let c = q(cn, cd);
        let b = bounds::iso_bounds(d, a, &c);
        let m: BigInt = b.root_ceiling.parse().unwrap();
        let target = q(2 * a as i64, 1) / &c;
        let pow = |x: &BigInt| BigRational::from_integer(x.pow(d as u32));
        prop_assert!(pow(&m) >= target);
        prop_assert!(pow(&(m - 1)) < target);
    }
}
