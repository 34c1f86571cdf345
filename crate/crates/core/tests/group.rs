mod common;

use common::{bfs_profile, heisenberg_gens, heisenberg_mul, zd_ball};
use growthlab::group::{self, GroupElement, GroupError, GroupSpec, IntMatrix};
use num_bigint::BigInt;
use proptest::prelude::*;

const BUDGET: usize = 10_000_000;

fn profile(name: &str, r: usize) -> group::BallProfile {
    group::ball_profile(&group::builtin(name).unwrap(), r, BUDGET).unwrap()
}

#[test]
fn free_abelian_matches_closed_form() {
    for d in 1..=4u64 {
        let p = profile(&format!("builtin:zd:{d}"), 8);
        for n in 0..=8 {
            assert_eq!(BigInt::from(p.s(n)), zd_ball(d, n as u64), "Z^{d} n={n}");
        }
    }
}

#[test]
fn heisenberg_matches_triple_model() {
    let p = profile("builtin:heisenberg", 9);
    let oracle = bfs_profile((0, 0, 0), &heisenberg_gens(), heisenberg_mul, 9);
    assert_eq!(p.cumulative, oracle);
    assert_eq!(&p.cumulative[..5], &[1, 5, 17, 53, 135]);
}

#[test]
fn unitriangular_four_matches_direct_matrices() {
    let n = 4usize;
    let gens: Vec<Vec<i64>> = (1..n)
        .flat_map(|i| {
            [1i64, -1].map(|s| {
                let mut m = vec![0i64; n * n];
                for k in 0..n {
                    m[k * n + k] = 1;
                }
                m[(i - 1) * n + i] = s;
                m
            })
        })
        .collect();
    let mul = |a: &Vec<i64>, b: &Vec<i64>| {
        let mut c = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                c[i * n + j] = (0..n).map(|k| a[i * n + k] * b[k * n + j]).sum();
            }
        }
        c
    };
    let mut id = vec![0i64; n * n];
    for k in 0..n {
        id[k * n + k] = 1;
    }
    assert_eq!(profile("builtin:ut:4", 6).cumulative, bfs_profile(id, &gens, mul, 6));
}

#[test]
fn finite_and_dihedral_groups() {
    let p = profile("builtin:cyclic:5", 6);
    assert_eq!(p.cumulative, vec![1, 3, 5, 5, 5, 5, 5]);
    assert!(p.exhausted);
    let p = profile("builtin:cyclic:2", 3);
    assert_eq!(&p.cumulative[..2], &[1, 2]);
    let g = group::builtin("builtin:cyclic:2").unwrap();
    assert_eq!(g.valency(), 1);
    let dinf = group::builtin("builtin:dinf").unwrap();
    assert_eq!(dinf.valency(), 2);
    let p = group::ball_profile(&dinf, 10, BUDGET).unwrap();
    assert!((0..=10).all(|n| p.s(n) == 2 * n as u64 + 1));
}

#[test]
fn spec_json_round_trip_and_validation() {
    let text = r#"{"type":"IntegerMatrixGroup","dimension":2,"generators":[[["1","1"],["0","1"]],[1,0,1,1]]}"#;
    let spec: GroupSpec = serde_json::from_str(text).unwrap();
    let g = group::build_group(&spec).unwrap();
    assert_eq!(g.valency(), 4);
    let back: GroupSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(back, spec);

    let bad = |t: &str| group::build_group(&serde_json::from_str::<GroupSpec>(t).unwrap()).unwrap_err();
    assert!(matches!(
        bad(r#"{"type":"IntegerMatrixGroup","dimension":2,"generators":[[[2,0],[0,1]]]}"#),
        GroupError::NonInvertibleGenerator { index: 0, .. }
    ));
    assert!(matches!(
        bad(r#"{"type":"IntegerMatrixGroup","dimension":2,"generators":[]}"#),
        GroupError::EmptyGeneratorSet
    ));
    assert!(matches!(
        bad(r#"{"type":"IntegerMatrixGroup","dimension":2,"generators":[[[1,0],[0,1]]]}"#),
        GroupError::IdentityGenerator { index: 0 }
    ));
    assert!(matches!(
        bad(r#"{"type":"IntegerMatrixGroup","dimension":3,"generators":[[[1,1],[0,1]]]}"#),
        GroupError::DimensionMismatch { index: 0, .. }
    ));
    assert!(group::builtin("builtin:nope").is_err());
    assert!(group::builtin("builtin:zd:0").is_err());
    assert!(group::builtin("zd:2").is_err());
}

#[test]
fn big_entries_are_exact() {
    let big = "123456789012345678901234567890";
    let text = format!(r#"{{"type":"IntegerMatrixGroup","dimension":2,"generators":[[["1","{big}"],["0","1"]]]}}"#);
    let g = group::build_group(&serde_json::from_str(&text).unwrap()).unwrap();
    let ball = group::enumerate_ball(&g, 2, BUDGET).unwrap();
    let far = ball.within(2).iter().filter_map(GroupElement::as_matrix).map(|m| m.entry(1, 2).clone()).max().unwrap();
    assert_eq!(far, BigInt::parse_bytes(big.as_bytes(), 10).unwrap() * 2);
}

#[test]
fn budget_is_enforced() {
    let g = group::builtin("builtin:zd:3").unwrap();
    match group::ball_profile(&g, 50, 1000) {
        Err(GroupError::BudgetExceeded { completed_radius }) => assert!(completed_radius < 50),
        other => panic!("{other:?}"),
    }
}

#[test]
fn matrix_arithmetic() {
    let a = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
    assert_eq!(a.det(), BigInt::from(1));
    let inv = a.inverse().unwrap();
    assert!(a.mul(&inv).is_identity());
    assert!(IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).inverse().is_none());
}

#[test]
fn profile_independent_of_thread_count() {
    let g = group::builtin("builtin:ut:4").unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| group::enumerate_ball(&g, 7, BUDGET).unwrap())
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.profile, b.profile);
    assert_eq!(a.elements, b.elements);
}

#[test]
fn vertex_boundary_of_balls() {
    let g = group::builtin("builtin:zd:2").unwrap();
    let ball = group::enumerate_ball(&g, 5, BUDGET).unwrap();
    for r in 0..5 {
        assert_eq!(group::vertex_boundary_size(&g, ball.within(r)) as u64, ball.profile.a(r + 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn infinite_families_grow_at_least_linearly(which in 0usize..5, r in 1usize..7) {
        let name = ["builtin:zd:1", "builtin:zd:2", "builtin:zd:3", "builtin:heisenberg", "builtin:ut:4"][which];
        let p = profile(name, r);
        for n in 1..=r {
            prop_assert!(p.s(n) > 2 * n as u64);
        }
    }

    #[test]
    fn submultiplicative(which in 0usize..6, r in 2usize..8) {
        let name = ["builtin:zd:2", "builtin:heisenberg", "builtin:ut:4", "builtin:cyclic:7", "builtin:dinf", "builtin:zd:4"][which];
        let p = profile(name, r);
        for m in 0..=r {
            for n in 0..=r - m {
                prop_assert!(p.s(m + n) <= p.s(m) * p.s(n));
            }
        }
    }

    #[test]
    fn quotient_kernel_on_z2(m in 0usize..10, n in 0usize..10) {
        let g = group::builtin("builtin:zd:2").unwrap();
        let p = group::ball_profile(&g, m + n, BUDGET).unwrap();
        let h = group::subgroup_ball_count(&g, n, BUDGET, |x| x.as_lattice().is_some_and(|v| v[1] == 0)).unwrap();
        prop_assert!(p.s(m + n) >= (2 * m as u64 + 1) * h);
    }

    #[test]
    fn random_matrix_groups_are_deterministic(a in -2i64..=2, b in -2i64..=2, c in -2i64..=2) {
        // Two unipotent generators with random off-diagonal entries.
        let text = format!(
            r#"{{"type":"IntegerMatrixGroup","dimension":3,"generators":[[[1,1,{a}],[0,1,{b}],[0,0,1]],[[1,{c},0],[0,1,1],[0,0,1]]]}}"#
        );
        let spec: GroupSpec = serde_json::from_str(&text).unwrap();
        let g = group::build_group(&spec).unwrap();
        let p1 = group::ball_profile(&g, 5, BUDGET).unwrap();
        let p2 = group::ball_profile(&group::build_group(&spec).unwrap(), 5, BUDGET).unwrap();
        prop_assert_eq!(p1, p2);
    }
}
