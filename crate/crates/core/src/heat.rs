//! Exact heat kernels of the lazy simple random walk on a Cayley graph.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bounds::{return_prob_bound, BoundReport, Status};
use crate::exact::{int, rat_string};
use crate::group::{BallProfile, GroupElement, GroupError, GroupModel};
use crate::tower::{certify, Cmp, Expr, DEFAULT_PREC};

/// Probability distribution on group elements, keyed canonically.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    mass: BTreeMap<Vec<u8>, (GroupElement, BigRational)>,
}

impl Distribution {
    pub fn point(g: &GroupModel, x: GroupElement) -> Self {
        let mut mass = BTreeMap::new();
        mass.insert(g.key(&x), (x, BigRational::one()));
        Distribution { mass }
    }

    pub fn from_weights(g: &GroupModel, items: Vec<(GroupElement, BigRational)>) -> Self {
        let mut d = Distribution { mass: BTreeMap::new() };
        for (x, p) in items {
            d.add(g, x, p);
        }
        d
    }

    fn add(&mut self, g: &GroupModel, x: GroupElement, p: BigRational) {
        self.mass
            .entry(g.key(&x))
            .and_modify(|e| e.1 += &p)
            .or_insert((x, p));
    }

    pub fn get(&self, g: &GroupModel, x: &GroupElement) -> BigRational {
        self.mass.get(&g.key(x)).map(|e| e.1.clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn support_size(&self) -> usize {
        self.mass.len()
    }

    pub fn total(&self) -> BigRational {
        self.mass.values().fold(BigRational::zero(), |acc, e| acc + &e.1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, &BigRational)> {
        self.mass.values().map(|(x, p)| (x, p))
    }
}

/// One step of the lazy walk: hold with probability 1/2, else move by a uniform generator on the right.
pub fn lazy_step(g: &GroupModel, dist: &Distribution) -> Distribution {
    let delta = g.valency() as i64;
    let hold = BigRational::new(BigInt::one(), BigInt::from(2));
    let move_w = BigRational::new(BigInt::one(), BigInt::from(2 * delta));
    let mut out = Distribution { mass: BTreeMap::new() };
    for (x, p) in dist.mass.values() {
        out.add(g, x.clone(), p * &hold);
        let pm = p * &move_w;
        for s in g.generators() {
            out.add(g, g.compose(x, s), pm.clone());
        }
    }
    out
}

/// `p_0..p_T` with `p_t = p_t(o, o)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeatSeries {
    #[serde(with = "crate::exact::serde_rat_vec")]
    pub p: Vec<BigRational>,
}

#[derive(Debug, Clone)]
pub struct HeatRun {
    pub series: HeatSeries,
    /// Distribution after the last step.
    pub last: Distribution,
    /// Total mass after each step.
    pub totals: Vec<BigRational>,
}

/// Runs `T` steps from the identity, failing when the support exceeds `budget` elements.
pub fn run_walk(g: &GroupModel, t_max: usize, budget: usize) -> Result<HeatRun, GroupError> {
    let o = g.identity();
    let mut dist = Distribution::point(g, o.clone());
    let mut p = vec![BigRational::one()];
    let mut totals = vec![BigRational::one()];
    for t in 1..=t_max {
        dist = lazy_step(g, &dist);
        if dist.support_size() > budget {
            return Err(GroupError::BudgetExceeded { completed_radius: t - 1 });
        }
        p.push(dist.get(g, &o));
        totals.push(dist.total());
    }
    Ok(HeatRun { series: HeatSeries { p }, last: dist, totals })
}

pub fn return_series(g: &GroupModel, t_max: usize, budget: usize) -> Result<HeatSeries, GroupError> {
    run_walk(g, t_max, budget).map(|r| r.series)
}

fn status_of(cmp: Cmp, want: &[Cmp]) -> Status {
    if want.contains(&cmp) {
        Status::Satisfied
    } else if cmp.is_decided() {
        Status::Violated
    } else {
        Status::Undecided
    }
}

/// Checks `p_t ≤ return_prob_bound(d, Δ, t, c)` for every `t ≥ 1`, and `p_{2t} ≥ 1/s_t` where both are known.
pub fn check_return_bounds(series: &HeatSeries, profile: &BallProfile, d: u64, delta: u64, c: &Expr) -> Vec<BoundReport> {
    let mut out = Vec::new();
    let t_max = series.p.len() - 1;
    for t in 1..=t_max {
        let pt = &series.p[t];
        let bound = return_prob_bound(d, delta, t as u64, c.clone());
        let cert = certify(&Expr::Rat(pt.clone()), &bound, DEFAULT_PREC);
        let bound_text = cert.rhs.as_ref().map(|b| b.to_string()).unwrap_or_else(|| bound.to_string());
        out.push(BoundReport::new(
            "return_upper",
            &[("d", d.to_string()), ("delta", delta.to_string()), ("t", t.to_string()), ("c", c.to_string())],
            bound_text,
            Some(rat_string(pt)),
            status_of(cert.cmp, &[Cmp::Less, Cmp::Equal]),
        ));
    }
    for t in 1..=t_max / 2 {
        if t > profile.radius {
            break;
        }
        let lower = BigRational::new(BigInt::one(), BigInt::from(profile.s(t)));
        let p2t = &series.p[2 * t];
        let status = if *p2t >= lower { Status::Satisfied } else { Status::Violated };
        out.push(BoundReport::new(
            "return_lower",
            &[("t", t.to_string())],
            rat_string(&lower),
            Some(rat_string(p2t)),
            status,
        ));
    }
    out
}

/// `5131 Δ^{5/2} / ε` for the loop-erased walk estimate, with `ε` supplied as an expression.
pub fn loop_erased_constant(delta: u64, eps: Expr) -> Expr {
    Expr::int(5131) * Expr::int(delta as i64).pow(Expr::rat(5, 2)) / eps
}

/// Monotonicity `p_{t+1} ≤ p_t` over the series.
pub fn is_nonincreasing(series: &HeatSeries) -> bool {
    series.p.windows(2).all(|w| w[1] <= w[0])
}

/// Exact normalization after every step.
pub fn mass_is_one(run: &HeatRun) -> bool {
    run.totals.iter().all(|m| *m == int(1))
}
