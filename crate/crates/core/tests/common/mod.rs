#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use growthlab::tower::{Dyadic, Expr, TowerReal};
use num_bigint::BigInt;
use rand::Rng;

/// Oracle working precision in bits (about 510 decimal digits).
pub const ORACLE_BITS: usize = 1700;
/// Relative slack allowed between oracle values and tower enclosures.
pub const SLACK_BITS: usize = 1400;
const RM: RoundingMode = RoundingMode::ToEven;

pub struct Oracle {
    cc: Consts,
}

impl Default for Oracle {
    fn default() -> Self {
        Self::new()
    }
}

impl Oracle {
    pub fn new() -> Self {
        Oracle { cc: Consts::new().expect("astro-float constants") }
    }

    pub fn int(&mut self, v: &BigInt) -> BigFloat {
        BigFloat::parse(&v.to_string(), Radix::Dec, ORACLE_BITS + v.bits() as usize, RM, &mut self.cc)
    }

    pub fn ratio(&mut self, n: &BigInt, d: &BigInt) -> BigFloat {
        let n = self.int(n);
        let d = self.int(d);
        n.div(&d, ORACLE_BITS, RM)
    }

    /// Exact conversion of a dyadic.
    pub fn dyadic(&mut self, x: &Dyadic) -> BigFloat {
        let m = x.mantissa().clone();
        let e = x.exponent();
        let two = BigInt::from(2);
        if e >= 0 {
            self.int(&(m * two.pow(e as u32)))
        } else {
            let den = two.pow((-e) as u32);
            let p = ORACLE_BITS + m.bits() as usize + (-e) as usize;
            let n = BigFloat::parse(&m.to_string(), Radix::Dec, p, RM, &mut self.cc);
            let d = BigFloat::parse(&den.to_string(), Radix::Dec, p, RM, &mut self.cc);
            n.div(&d, p, RM)
        }
    }

    pub fn e(&mut self) -> BigFloat {
        self.cc.e(ORACLE_BITS, RM)
    }

    pub fn exp(&mut self, x: &BigFloat) -> BigFloat {
        x.exp(ORACLE_BITS, RM, &mut self.cc)
    }

    pub fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(ORACLE_BITS, RM, &mut self.cc)
    }

    /// Value of an expression, or `None` when it is not a finite positive number.
    pub fn eval(&mut self, e: &Expr) -> Option<BigFloat> {
        let p = ORACLE_BITS;
        let v = match e {
            Expr::Int(v) => self.int(v),
            Expr::Rat(r) => self.ratio(r.numer(), r.denom()),
            Expr::Fact(k) => {
                let k: u64 = k.try_into().ok()?;
                if k > 3000 {
                    return None;
                }
                self.int(&(1..=k).fold(BigInt::from(1), |a, i| a * i))
            }
            Expr::E => self.cc.e(p, RM),
            Expr::Pi => self.cc.pi(p, RM),
            Expr::Ln2 => self.cc.ln_2(p, RM),
            Expr::Add(a, b) => self.eval(a)?.add(&self.eval(b)?, p, RM),
            Expr::Sub(a, b) => self.eval(a)?.sub(&self.eval(b)?, p, RM),
            Expr::Mul(a, b) => self.eval(a)?.mul(&self.eval(b)?, p, RM),
            Expr::Div(a, b) => self.eval(a)?.div(&self.eval(b)?, p, RM),
            Expr::Pow(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                a.pow(&b, p, RM, &mut self.cc)
            }
            Expr::Exp(a) => {
                let a = self.eval(a)?;
                self.exp(&a)
            }
            Expr::ExpNeg(a) => {
                let a = self.eval(a)?;
                self.exp(&a.neg())
            }
            Expr::Ln(a) => {
                let a = self.eval(a)?;
                self.ln(&a)
            }
            Expr::NegLn(a) => {
                let a = self.eval(a)?;
                self.ln(&a).neg()
            }
            Expr::Sqrt(a) => self.eval(a)?.sqrt(p, RM),
            Expr::Recip(a) => self.eval(a)?.reciprocal(p, RM),
        };
        let positive = !v.is_nan() && !v.is_inf() && !v.is_zero() && !v.is_negative();
        // Values too close to the exponent range are unreliable for the oracle.
        let in_range = v.exponent().is_some_and(|x| x.abs() < 1 << 28);
        (positive && in_range).then_some(v)
    }

    /// True when `x` lies in `[lo, hi]` up to a relative slack of `2^-slack_bits`.
    pub fn within(&mut self, x: &BigFloat, lo: &Dyadic, hi: &Dyadic, slack_bits: usize) -> bool {
        let lo = self.dyadic(lo);
        let hi = self.dyadic(hi);
        let eps = BigFloat::from_u8(1, 64).div(&BigFloat::from_u8(2, 64).powi(slack_bits, ORACLE_BITS, RM), ORACLE_BITS, RM);
        let tol = x.abs().mul(&eps, ORACLE_BITS, RM);
        let lo_ok = lo.sub(&tol, ORACLE_BITS, RM).cmp(x).is_some_and(|c| c <= 0);
        let hi_ok = hi.add(&tol, ORACLE_BITS, RM).cmp(x).is_some_and(|c| c >= 0);
        lo_ok && hi_ok
    }

    /// Containment of the oracle value in a tower enclosure of height at most 1.
    pub fn encloses(&mut self, t: &TowerReal, x: &BigFloat) -> Option<bool> {
        if t.height() > 1 {
            return None;
        }
        let mut v = x.clone();
        if t.is_recip() {
            v = v.reciprocal(ORACLE_BITS, RM);
        }
        if t.height() == 1 {
            v = self.ln(&v);
            if v.is_nan() || v.is_inf() {
                return None;
            }
        }
        let m = t.mantissa();
        Some(self.within(&v, &m.lo, &m.hi, SLACK_BITS))
    }

    pub fn less(&mut self, a: &BigFloat, b: &BigFloat) -> bool {
        a.cmp(b).is_some_and(|c| c < 0)
    }
}

/// Random expression of depth at most `depth`.
pub fn random_expr<R: Rng>(rng: &mut R, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..7) {
            0 | 1 => Expr::int(rng.gen_range(1..=40)),
            2 => Expr::rat(rng.gen_range(1..=30), rng.gen_range(1..=30)),
            3 => Expr::E,
            4 => Expr::Pi,
            5 => Expr::Ln2,
            _ => Expr::fact(BigInt::from(rng.gen_range(1..=40))),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..12) {
        0 | 1 => random_expr(rng, d) + random_expr(rng, d),
        2 => random_expr(rng, d) - random_expr(rng, d),
        3 | 4 => random_expr(rng, d) * random_expr(rng, d),
        5 => random_expr(rng, d) / random_expr(rng, d),
        6 => random_expr(rng, d).pow(random_expr(rng, d.min(1))),
        7 => random_expr(rng, d).exp(),
        8 => random_expr(rng, d).exp_neg(),
        9 => random_expr(rng, d).ln(),
        10 => random_expr(rng, d).sqrt(),
        _ => random_expr(rng, d).recip(),
    }
}

/// Independent word-metric ball sizes by breadth-first search over hashable states.
pub fn bfs_profile<T, F>(identity: T, gens: &[T], mul: F, radius: usize) -> Vec<u64>
where
    T: Clone + Eq + std::hash::Hash + Ord,
    F: Fn(&T, &T) -> T,
{
    let mut seen: BTreeSet<T> = BTreeSet::new();
    seen.insert(identity.clone());
    let mut frontier = vec![identity];
    let mut out = vec![1u64];
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for g in gens {
                let y = mul(x, g);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        out.push(seen.len() as u64);
        frontier = next;
    }
    out
}

/// Heisenberg triples `(a, b, c)` with `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
pub fn heisenberg_mul(x: &(i64, i64, i64), y: &(i64, i64, i64)) -> (i64, i64, i64) {
    (x.0 + y.0, x.1 + y.1, x.2 + y.2 + x.0 * y.1)
}

pub fn heisenberg_gens() -> Vec<(i64, i64, i64)> {
    vec![(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]
}

/// `s_n` of the standard word metric on `Z^d`: `sum_k 2^k C(d,k) C(n,k)`.
pub fn zd_ball(d: u64, n: u64) -> BigInt {
    let binom = |a: u64, b: u64| -> BigInt {
        if b > a {
            return BigInt::from(0);
        }
        (0..b).fold(BigInt::from(1), |acc, i| acc * (a - i) / (i + 1))
    };
    (0..=d).map(|k| BigInt::from(2).pow(k as u32) * binom(d, k) * binom(n, k)).sum()
}

/// Lazy walk on `Z^d` by direct convolution on coordinate vectors.
pub fn zd_lazy_return(d: usize, t_max: usize) -> Vec<num_rational::BigRational> {
    use num_rational::BigRational;
    let mut dist: HashMap<Vec<i64>, BigRational> = HashMap::new();
    dist.insert(vec![0; d], BigRational::from_integer(1.into()));
    let hold = BigRational::new(1.into(), 2.into());
    let step = BigRational::new(1.into(), BigInt::from(4 * d));
    let mut out = vec![BigRational::from_integer(1.into())];
    for _ in 0..t_max {
        let mut next: HashMap<Vec<i64>, BigRational> = HashMap::new();
        for (x, p) in &dist {
            *next.entry(x.clone()).or_insert_with(|| BigRational::from_integer(0.into())) += p * &hold;
            for i in 0..d {
                for s in [-1, 1] {
                    let mut y = x.clone();
                    y[i] += s;
                    *next.entry(y).or_insert_with(|| BigRational::from_integer(0.into())) += p * &step;
                }
            }
        }
        dist = next;
        out.push(dist.get(&vec![0; d]).cloned().unwrap_or_else(|| BigRational::from_integer(0.into())));
    }
    out
}
