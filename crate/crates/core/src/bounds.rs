//! Closed-form growth constants and lower bounds, plus checks against measured profiles.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{factorial, int, pow_big, rat_decimal, rat_string};
use crate::group::BallProfile;
use crate::tower::{certify, interval::ceil_root, Cmp, Expr, Interval, TowerReal, DEFAULT_PREC, MAX_PREC};

/// Default constant `C` in the effective degree bound.
pub const DEFAULT_C: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Satisfied,
    Violated,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub bound: String,
    pub measured: Option<String>,
    pub status: Status,
}

impl BoundReport {
    pub fn new(name: &str, params: &[(&str, String)], bound: String, measured: Option<String>, status: Status) -> Self {
        BoundReport {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            bound,
            measured,
            status,
        }
    }
}

/// Runs `f` at doubling precision until it yields a decided comparison.
pub fn decide_with_retry<F>(start: u32, f: F) -> (Cmp, u32)
where
    F: Fn(u32) -> Option<Cmp>,
{
    let mut prec = start;
    loop {
        let c = f(prec).unwrap_or(Cmp::Undecided);
        if c.is_decided() || prec * 2 > MAX_PREC {
            return (c, prec);
        }
        prec *= 2;
    }
}

/// Minkowski's bound `(2k)!` on finite subgroups of `GL_k(Z)`.
pub fn minkowski_bound(k: u64) -> BigInt {
    factorial(2 * k)
}

fn monomial_over_pow2(n: u64, d: u64, e: u64) -> BigRational {
    BigRational::new(pow_big(&BigInt::from(n), d), BigInt::one() << e)
}

/// `n^d / 2^{d²}`.
pub fn nilp_lower_bound(d: u64, n: u64) -> BigRational {
    monomial_over_pow2(n, d, d * d)
}

/// `n^d / (2^{d(d+2)} ((2h)!)^d)`.
pub fn vnilp_lower_bound(d: u64, h: u64, n: u64) -> BigRational {
    let den = (BigInt::one() << (d * (d + 2))) * pow_big(&minkowski_bound(h), d);
    BigRational::new(pow_big(&BigInt::from(n), d), den)
}

/// `n^d / 2^{⌊7d/4⌋²}`.
pub fn deg_at_least_bound(d: u64, n: u64) -> BigRational {
    let f = 7 * d / 4;
    monomial_over_pow2(n, d, f * f)
}

/// `n^d / (2^{d(d+2)} ((2d)!)^{d+1})`.
pub fn vt_lower_bound(d: u64, n: u64) -> BigRational {
    let den = (BigInt::one() << (d * (d + 2))) * pow_big(&minkowski_bound(d), d + 1);
    BigRational::new(pow_big(&BigInt::from(n), d), den)
}

/// Which of the two expressions defining `ε_d` is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EpsBranch {
    First,
    Second,
    Min,
}

/// Outcome of deciding the minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchChoice {
    First,
    Second,
    Undecided,
}

/// `1 / (2^{3C^{4d}} · ((2C^d)!)^{C^{2d}})`.
pub fn epsilon_first_expr(d: u64, c: u64) -> Expr {
    let cb = BigInt::from(c);
    let c4d = pow_big(&cb, 4 * d);
    let c2d = pow_big(&cb, 2 * d);
    let cd = pow_big(&cb, d);
    let two_pow = Expr::int(2).pow(Expr::big(BigInt::from(3) * c4d));
    let g = Expr::fact(BigInt::from(2) * cd).pow(Expr::big(c2d));
    (two_pow * g).recip()
}

/// `1 / exp(d · exp(C · d^C))`.
pub fn epsilon_second_expr(d: u64, c: u64) -> Expr {
    let dc = pow_big(&BigInt::from(d), c);
    (Expr::int(d as i64) * (Expr::big(BigInt::from(c) * dc)).exp()).exp_neg()
}

pub fn epsilon_expr(d: u64, c: u64, branch: EpsBranch, choice: BranchChoice) -> Expr {
    match (branch, choice) {
        (EpsBranch::First, _) | (EpsBranch::Min, BranchChoice::First) => epsilon_first_expr(d, c),
        _ => epsilon_second_expr(d, c),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpsilonReport {
    pub d: u64,
    pub c: u64,
    pub first: Option<TowerReal>,
    pub second: Option<TowerReal>,
    /// The branch attaining the minimum.
    pub branch: BranchChoice,
    pub value: Option<TowerReal>,
    pub precision: u32,
}

/// `ε_d` at constant `C`, with the minimum decided by certified comparison.
pub fn epsilon_d(d: u64, c: u64) -> EpsilonReport {
    let cert = certify(&epsilon_first_expr(d, c), &epsilon_second_expr(d, c), DEFAULT_PREC);
    let branch = match cert.cmp {
        Cmp::Less | Cmp::Equal => BranchChoice::First,
        Cmp::Greater => BranchChoice::Second,
        Cmp::Undecided => BranchChoice::Undecided,
    };
    let value = match (branch, &cert.lhs, &cert.rhs) {
        (BranchChoice::First, Some(a), _) => Some(a.clone()),
        (BranchChoice::Second, _, Some(b)) => Some(b.clone()),
        (_, Some(a), Some(b)) => a.hull(b).ok(),
        _ => None,
    };
    EpsilonReport { d, c, first: cert.lhs, second: cert.rhs, branch, value, precision: cert.prec }
}

/// `8 d^{(d+5)/2} Δ^{d/2} / (c e^{d/2}) · t^{-d/2}` for a growth constant given as an expression.
pub fn return_prob_bound(d: u64, delta: u64, t: u64, c: Expr) -> Expr {
    let half_d = || Expr::rat(d as i64, 2);
    let num = Expr::int(8) * Expr::int(d as i64).pow(Expr::rat(d as i64 + 5, 2)) * Expr::int(delta as i64).pow(half_d());
    let den = c * Expr::E.pow(half_d()) * Expr::int(t as i64).pow(half_d());
    num / den
}

/// Exact rational as an expression (zero is not representable).
pub fn rational_expr(r: &BigRational) -> Expr {
    Expr::Rat(r.clone())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsoBounds {
    pub d: u64,
    pub a: u64,
    pub c: String,
    /// `⌈(2a/c)^{1/d}⌉`.
    pub root_ceiling: String,
    /// `a / (2 ⌈(2a/c)^{1/d}⌉)`, exact.
    pub csc: String,
    #[serde(skip)]
    pub csc_value: BigRational,
    /// Certified lower bound on `c^{1/d} a^{(d-1)/d} / 8`.
    pub power_lower: String,
    #[serde(skip)]
    pub power_enclosure: Option<Interval>,
}

pub fn iso_bounds(d: u64, a: u64, c: &BigRational) -> IsoBounds {
    assert!(d >= 1 && a >= 1 && *c > BigRational::zero());
    let q = int(2 * a as i64) / c;
    let m = ceil_root(&q, d as u32);
    let csc = BigRational::new(BigInt::from(a), BigInt::from(2) * &m);
    let prec = DEFAULT_PREC;
    let ci = Interval::from_rational(c, prec);
    let ai = Interval::from_int(a as i64);
    let log = ci.ln(prec).add(&ai.ln(prec).scale_int(d as i64 - 1, prec), prec);
    let log = log.div(&Interval::from_int(d as i64), prec);
    let power = log.exp(prec).mul_pow2(-3);
    IsoBounds {
        d,
        a,
        c: rat_string(c),
        root_ceiling: m.to_string(),
        csc: rat_string(&csc),
        csc_value: csc,
        power_lower: power.lo.to_decimal(20, crate::tower::Round::Down),
        power_enclosure: Some(power),
    }
}

/// First `n ≥ 1` with `a_n ≤ n`, with the index bound `a_n`.
pub fn linear_growth_criterion(profile: &BallProfile) -> Option<(usize, u64)> {
    (1..=profile.radius).find(|&n| profile.a(n) <= n as u64).map(|n| (n, profile.a(n)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitenessReport {
    /// Radii with `s_n ≤ 2n` (the group must be finite).
    pub finite_at: Vec<usize>,
    /// Radii with `s_n < (n+1)(n+2)/2` (the group must be virtually cyclic).
    pub virtually_cyclic_at: Vec<usize>,
    pub exhausted: bool,
}

pub fn finiteness_flags(profile: &BallProfile) -> FinitenessReport {
    let finite_at = (1..=profile.radius).filter(|&n| profile.s(n) <= 2 * n as u64).collect();
    let virtually_cyclic_at =
        (1..=profile.radius).filter(|&n| profile.s(n) < (n as u64 + 1) * (n as u64 + 2) / 2).collect();
    FinitenessReport { finite_at, virtually_cyclic_at, exhausted: profile.exhausted }
}

/// Compares each `s_n` with a rational lower bound.
pub fn check_lower_bound<F>(name: &str, profile: &BallProfile, params: &[(&str, String)], bound: F) -> Vec<BoundReport>
where
    F: Fn(u64) -> BigRational,
{
    (1..=profile.radius)
        .map(|n| {
            let b = bound(n as u64);
            let s = profile.s(n);
            let status = if int(s as i64) >= b { Status::Satisfied } else { Status::Violated };
            let mut p: Vec<(&str, String)> = params.to_vec();
            p.push(("n", n.to_string()));
            BoundReport::new(name, &p, rat_string(&b), Some(s.to_string()), status)
        })
        .collect()
}

/// Largest `c` with `s_n ≥ c n^d` on the profile: `min_n s_n / n^d`.
pub fn measured_growth_constant(profile: &BallProfile, d: u64) -> BigRational {
    (1..=profile.radius)
        .map(|n| BigRational::new(BigInt::from(profile.s(n)), pow_big(&BigInt::from(n), d)))
        .min()
        .unwrap_or_else(|| int(1))
}

/// Short decimal for reports.
pub fn approx(r: &BigRational) -> String {
    rat_decimal(r, 12)
}
