mod common;

use common::zd_lazy_return;
use growthlab::bounds::{self, Status};
use growthlab::group::{self, GroupError};
use growthlab::heat::{self, Distribution};
use growthlab::tower::Expr;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const BUDGET: usize = 10_000_000;

#[test]
fn integers_match_central_binomial() {
    let g = group::builtin("builtin:zd:1").unwrap();
    let s = heat::return_series(&g, 30, BUDGET).unwrap();
    for t in 0..=30u64 {
        let c: BigInt = (1..=t).fold(BigInt::from(1), |a, i| a * (t + i) / i);
        assert_eq!(s.p[t as usize], BigRational::new(c, BigInt::from(4).pow(t as u32)), "t={t}");
    }
    assert_eq!(s.p[2], BigRational::new(3.into(), 8.into()));
}

#[test]
fn lattices_match_convolution() {
    for d in 2..=3 {
        let g = group::builtin(&format!("builtin:zd:{d}")).unwrap();
        assert_eq!(heat::return_series(&g, 8, BUDGET).unwrap().p, zd_lazy_return(d, 8));
    }
}

#[test]
fn involutions_count_once() {
    // Two involutive generators: each step moves with probability 1/4 per generator.
    let g = group::builtin("builtin:dinf").unwrap();
    let s = heat::return_series(&g, 3, BUDGET).unwrap();
    assert_eq!(s.p[1], BigRational::new(1.into(), 2.into()));
    assert_eq!(s.p[2], BigRational::new(3.into(), 8.into()));
    let c = group::builtin("builtin:cyclic:2").unwrap();
    let s = heat::return_series(&c, 2, BUDGET).unwrap();
    assert_eq!(s.p[1], BigRational::new(1.into(), 2.into()));
    assert_eq!(s.p[2], BigRational::new(1.into(), 2.into()));
}

#[test]
fn kernel_is_symmetric() {
    for name in ["builtin:heisenberg", "builtin:dinf", "builtin:ut:4", "builtin:cyclic:5"] {
        let g = group::builtin(name).unwrap();
        let run = heat::run_walk(&g, 6, BUDGET).unwrap();
        for (x, p) in run.last.iter() {
            assert_eq!(&run.last.get(&g, &g.inverse(x)), p, "{name}");
        }
        assert_eq!(run.last.total(), BigRational::from_integer(1.into()));
    }
}

#[test]
fn distributions_merge_weights() {
    let g = group::builtin("builtin:zd:1").unwrap();
    let x = g.supplied_generators()[0].clone();
    let half = BigRational::new(1.into(), 2.into());
    let d = Distribution::from_weights(&g, vec![(x.clone(), half.clone()), (x.clone(), half.clone())]);
    assert_eq!(d.support_size(), 1);
    assert_eq!(d.get(&g, &x), BigRational::from_integer(1.into()));
    let step = heat::lazy_step(&g, &Distribution::point(&g, g.identity()));
    assert_eq!(step.support_size(), 3);
}

#[test]
fn budget_exceeded() {
    let g = group::builtin("builtin:zd:3").unwrap();
    assert!(matches!(heat::run_walk(&g, 20, 50), Err(GroupError::BudgetExceeded { .. })));
}

#[test]
fn bound_checks_on_heisenberg() {
    let g = group::builtin("builtin:heisenberg").unwrap();
    let run = heat::run_walk(&g, 12, BUDGET).unwrap();
    let p = group::ball_profile(&g, 6, BUDGET).unwrap();
    let c = bounds::measured_growth_constant(&p, 4);
    let r = heat::check_return_bounds(&run.series, &p, 4, 4, &Expr::Rat(c));
    assert_eq!(r.iter().filter(|x| x.name == "return_upper").count(), 12);
    assert_eq!(r.iter().filter(|x| x.name == "return_lower").count(), 6);
    assert!(r.iter().all(|x| x.status == Status::Satisfied));
}

#[test]
fn tiny_growth_constant_leaves_bounds_satisfied() {
    // A smaller c only weakens the upper bound.
    let g = group::builtin("builtin:zd:2").unwrap();
    let run = heat::run_walk(&g, 6, BUDGET).unwrap();
    let p = group::ball_profile(&g, 3, BUDGET).unwrap();
    let r = heat::check_return_bounds(&run.series, &p, 2, 4, &Expr::rat(1, 1000));
    assert!(r.iter().all(|x| x.status == Status::Satisfied));
}

#[test]
fn loop_erased_constant_is_a_tower() {
    let e = heat::loop_erased_constant(4, bounds::epsilon_second_expr(5, 100));
    let v = e.eval(128).unwrap();
    assert!(v.height() >= 2 && !v.is_recip());
    let small = heat::loop_erased_constant(1, Expr::int(5131));
    let one = BigRational::from_integer(1.into());
    assert!(small.eval(128).unwrap().mantissa().contains_rational(&one));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mass_and_monotonicity(which in 0usize..6, t in 1usize..10) {
        let name = ["builtin:zd:1", "builtin:zd:2", "builtin:heisenberg", "builtin:dinf", "builtin:cyclic:3", "builtin:ut:4"][which];
        let g = group::builtin(name).unwrap();
        let run = heat::run_walk(&g, t, BUDGET).unwrap();
        prop_assert!(heat::mass_is_one(&run));
        prop_assert!(heat::is_nonincreasing(&run.series));
        let p = group::ball_profile(&g, t / 2, BUDGET).unwrap();
        for s in 1..=t / 2 {
            prop_assert!(&run.series.p[2 * s] * BigRational::from_integer(p.s(s).into()) >= BigRational::from_integer(1.into()));
        }
    }
}
