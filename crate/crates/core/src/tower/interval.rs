//! Closed intervals with dyadic endpoints. Every operation rounds outward, so the
//! result encloses the exact image of the operands.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::dyadic::{Dyadic, Round};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

/// Largest |x| accepted by [`Interval::exp`]; beyond this the result no longer
/// fits a 64-bit binary exponent comfortably and callers must move up a tower level.
pub const EXP_ARG_LIMIT: i64 = 1 << 40;

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo <= hi, "inverted interval {lo} > {hi}");
        Interval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_int(v: i64) -> Self {
        Interval::point(Dyadic::from_int(v))
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        let d = Dyadic::from_bigint(v);
        Interval::new(d.round(prec, Round::Down), d.round(prec, Round::Up))
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        Interval::new(
            Dyadic::from_rational(r, prec, Round::Down),
            Dyadic::from_rational(r, prec, Round::Up),
        )
    }

    pub fn zero() -> Self {
        Interval::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Interval::point(Dyadic::one())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        &self.lo.to_rational() <= r && r <= &self.hi.to_rational()
    }

    pub fn hull(&self, other: &Self) -> Self {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Width `hi - lo`, rounded up.
    pub fn width(&self, prec: u32) -> Dyadic {
        self.hi.sub(&self.lo, prec, Round::Up)
    }

    pub fn round(&self, prec: u32) -> Self {
        Interval { lo: self.lo.round(prec, Round::Down), hi: self.hi.round(prec, Round::Up) }
    }

    pub fn neg(&self) -> Self {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        Interval {
            lo: self.lo.add(&o.lo, prec, Round::Down),
            hi: self.hi.add(&o.hi, prec, Round::Up),
        }
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        Interval {
            lo: self.lo.sub(&o.hi, prec, Round::Down),
            hi: self.hi.sub(&o.lo, prec, Round::Up),
        }
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        if self.lo.signum() >= 0 && o.lo.signum() >= 0 {
            return Interval {
                lo: self.lo.mul(&o.lo, prec, Round::Down),
                hi: self.hi.mul(&o.hi, prec, Round::Up),
            };
        }
        let products = [
            self.lo.mul_exact(&o.lo),
            self.lo.mul_exact(&o.hi),
            self.hi.mul_exact(&o.lo),
            self.hi.mul_exact(&o.hi),
        ];
        let lo = products.iter().min().expect("four products").round(prec, Round::Down);
        let hi = products.iter().max().expect("four products").round(prec, Round::Up);
        Interval { lo, hi }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Interval { lo: self.lo.mul_pow2(k), hi: self.hi.mul_pow2(k) }
    }

    pub fn scale_int(&self, k: i64, prec: u32) -> Self {
        self.mul(&Interval::from_int(k), prec)
    }

    /// Quotient; the divisor must not contain zero.
    pub fn div(&self, o: &Self, prec: u32) -> Self {
        assert!(!o.contains_zero(), "interval division by an interval containing zero");
        let cands_lo = [
            self.lo.div(&o.lo, prec, Round::Down),
            self.lo.div(&o.hi, prec, Round::Down),
            self.hi.div(&o.lo, prec, Round::Down),
            self.hi.div(&o.hi, prec, Round::Down),
        ];
        let cands_hi = [
            self.lo.div(&o.lo, prec, Round::Up),
            self.lo.div(&o.hi, prec, Round::Up),
            self.hi.div(&o.lo, prec, Round::Up),
            self.hi.div(&o.hi, prec, Round::Up),
        ];
        Interval {
            lo: cands_lo.into_iter().min().expect("four"),
            hi: cands_hi.into_iter().max().expect("four"),
        }
    }

    pub fn recip(&self, prec: u32) -> Self {
        Interval::one().div(self, prec)
    }

    /// Square of a non-negative interval.
    pub fn sqr_nonneg(&self, prec: u32) -> Self {
        debug_assert!(!self.lo.is_negative());
        Interval {
            lo: self.lo.mul(&self.lo, prec, Round::Down),
            hi: self.hi.mul(&self.hi, prec, Round::Up),
        }
    }

    pub fn sqrt(&self, prec: u32) -> Self {
        let lo = if self.lo.is_negative() { Dyadic::zero() } else { self.lo.sqrt(prec, Round::Down) };
        Interval { lo, hi: self.hi.sqrt(prec, Round::Up) }
    }

    /// Integer power with non-negative base, by repeated squaring.
    pub fn powi_nonneg(&self, mut k: u64, prec: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Interval::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, prec);
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr_nonneg(prec);
            }
        }
        acc
    }

    /// Largest absolute endpoint.
    pub fn mag(&self) -> Dyadic {
        self.lo.abs().max(self.hi.abs())
    }

    /// Enclosure of `exp` over the interval. Arguments must satisfy |x| <= 2^40.
    pub fn exp(&self, prec: u32) -> Self {
        Interval { lo: exp_point(&self.lo, prec).lo, hi: exp_point(&self.hi, prec).hi }
    }

    /// Enclosure of `exp(x) - 1`, accurate in relative terms for small |x|.
    pub fn expm1(&self, prec: u32) -> Self {
        Interval { lo: expm1_point(&self.lo, prec).lo, hi: expm1_point(&self.hi, prec).hi }
    }

    /// Enclosure of `ln` over a positive interval.
    pub fn ln(&self, prec: u32) -> Self {
        assert!(self.is_positive(), "ln of non-positive interval");
        Interval { lo: ln_point(&self.lo, prec).lo, hi: ln_point(&self.hi, prec).hi }
    }

    /// Enclosure of `ln(1 + x)` for x > -1, accurate for small |x|.
    pub fn ln1p(&self, prec: u32) -> Self {
        Interval { lo: ln1p_point(&self.lo, prec).lo, hi: ln1p_point(&self.hi, prec).hi }
    }

    pub fn ln2(prec: u32) -> Self {
        ln2(prec)
    }

    pub fn pi(prec: u32) -> Self {
        pi(prec)
    }

    pub fn e(prec: u32) -> Self {
        exp_point(&Dyadic::one(), prec)
    }

    pub fn to_f64_mid(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }
}

/// Working precision used inside series evaluations.
fn guard(prec: u32) -> u32 {
    prec + 32
}

/// Sum of `y^j / j!` for a small point `y` (|y| <= 1/4), enclosed.
fn exp_series(y: &Dyadic, wp: u32) -> Interval {
    let yi = Interval::point(y.clone());
    let mut sum = Interval::one();
    let mut term = Interval::one();
    let target = -(wp as i64) - 4;
    let mut j: i64 = 1;
    loop {
        term = term.mul(&yi, wp).div(&Interval::from_int(j), wp);
        sum = sum.add(&term, wp);
        let m = term.mag();
        if m.is_zero() || m.top() < target {
            break;
        }
        j += 1;
    }
    // Remaining terms are bounded by a geometric series with ratio <= 1/2.
    let tail = term.mag().mul_pow2(1);
    let low = if y.is_positive() { Dyadic::zero() } else { tail.neg() };
    sum.add(&Interval::new(low, tail), wp)
}

fn exp_point(x: &Dyadic, prec: u32) -> Interval {
    if x.is_zero() {
        return Interval::one();
    }
    assert!(x.abs() <= Dyadic::from_int(EXP_ARG_LIMIT), "exp argument out of range");
    // Halve until |y| <= 2^-10, then square back up.
    let s = (x.top() + 11).max(0);
    let extra = (s as u32) + 2 * (prec as f64).sqrt() as u32;
    let wp = guard(prec) + extra;
    // Extra halvings shorten the series at high precision.
    let s = s + (prec as f64).sqrt() as i64 / 2;
    let y = x.mul_pow2(-s);
    let mut r = exp_series(&y, wp);
    if r.lo.is_negative() {
        r.lo = Dyadic::zero();
    }
    for _ in 0..s {
        r = r.sqr_nonneg(wp);
    }
    r.round(prec)
}

fn expm1_point(x: &Dyadic, prec: u32) -> Interval {
    if x.abs() > Dyadic::pow2(-4) {
        return exp_point(x, prec + 8).sub(&Interval::one(), prec);
    }
    // Direct series x + x^2/2 + ... keeps relative accuracy near zero.
    let wp = guard(prec);
    let xi = Interval::point(x.clone());
    let mut term = xi.clone();
    let mut sum = xi.clone();
    let target = x.top() - wp as i64 - 4;
    let mut j: i64 = 2;
    loop {
        term = term.mul(&xi, wp).div(&Interval::from_int(j), wp);
        sum = sum.add(&term, wp);
        let m = term.mag();
        if m.is_zero() || m.top() < target {
            break;
        }
        j += 1;
    }
    let tail = term.mag().mul_pow2(1);
    let low = if x.is_positive() { Dyadic::zero() } else { tail.neg() };
    sum.add(&Interval::new(low, tail), wp).round(prec)
}

/// `2 * atanh(z)` for a point-interval-like `z` in [0, 1/3], enclosed.
fn atanh2_series(z: &Interval, wp: u32) -> Interval {
    let z2 = z.mul(z, wp);
    let mut pow = z.clone();
    let mut sum = z.clone();
    let target = -(wp as i64) - 4;
    let mut j: i64 = 1;
    loop {
        pow = pow.mul(&z2, wp);
        let term = pow.div(&Interval::from_int(2 * j + 1), wp);
        sum = sum.add(&term, wp);
        let m = term.mag();
        if m.is_zero() || m.top() < target {
            break;
        }
        j += 1;
    }
    // Tail: sum_{i>j} z^{2i+1}/(2i+1) <= z^{2j+3}/(1 - z^2) <= (9/8) * pow * z^2.
    let tail = pow.mul(&z2, wp).hi.mul(&Dyadic::from_int(9), wp, Round::Up).mul_pow2(-3);
    let sum = sum.add(&Interval::new(Dyadic::zero(), tail), wp);
    sum.mul_pow2(1)
}

fn ln2(prec: u32) -> Interval {
    let wp = guard(prec);
    let third = Interval::from_int(1).div(&Interval::from_int(3), wp);
    atanh2_series(&third, wp).round(prec)
}

fn ln_point(x: &Dyadic, prec: u32) -> Interval {
    assert!(x.is_positive(), "ln of non-positive value");
    // x = m * 2^k with m in [1, 2).
    let k = x.top();
    let m = x.mul_pow2(-k);
    let wp = guard(prec) + 64 - k.unsigned_abs().leading_zeros().min(64);
    let mi = Interval::point(m);
    let one = Interval::one();
    let z = mi.sub(&one, wp).div(&mi.add(&one, wp), wp);
    let lnm = atanh2_series(&z, wp);
    let klog2 = ln2(wp).mul(&Interval::from_bigint(&BigInt::from(k), wp), wp);
    lnm.add(&klog2, wp).round(prec)
}

fn ln1p_point(x: &Dyadic, prec: u32) -> Interval {
    assert!(*x > Dyadic::from_int(-1), "ln1p argument must exceed -1");
    if x.is_zero() {
        return Interval::zero();
    }
    if x.abs() > Dyadic::pow2(-4) {
        return ln_point(&x.add_exact(&Dyadic::one()), prec);
    }
    // ln(1+x) = 2 atanh(x / (2 + x)), exact in relative terms near zero.
    let wp = guard(prec) + 8;
    let xi = Interval::point(x.clone());
    let z = xi.div(&xi.add(&Interval::from_int(2), wp), wp);
    if z.lo.is_negative() {
        // atanh is odd.
        return atanh2_series(&z.neg(), wp).neg().round(prec);
    }
    atanh2_series(&z, wp).round(prec)
}

/// `atan(1/q)` for integer q >= 2 via the alternating Taylor series.
fn atan_inv(q: i64, wp: u32) -> Interval {
    let qi = Interval::from_int(q);
    let q2 = Interval::from_int(q * q);
    let mut pow = Interval::one().div(&qi, wp);
    let mut sum = pow.clone();
    let target = -(wp as i64) - 4;
    let mut j: i64 = 1;
    loop {
        pow = pow.div(&q2, wp);
        let term = pow.div(&Interval::from_int(2 * j + 1), wp);
        sum = if j % 2 == 1 { sum.sub(&term, wp) } else { sum.add(&term, wp) };
        if term.mag().top() < target {
            break;
        }
        j += 1;
    }
    // Alternating series with decreasing terms: error below the next term.
    let next = pow.div(&q2, wp).hi;
    sum.add(&Interval::new(next.neg(), next), wp)
}

fn pi(prec: u32) -> Interval {
    let wp = guard(prec);
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239).
    let a = atan_inv(5, wp).mul_pow2(4);
    let b = atan_inv(239, wp).mul_pow2(2);
    a.sub(&b, wp).round(prec)
}

impl From<&Interval> for (f64, f64) {
    fn from(i: &Interval) -> (f64, f64) {
        (i.lo.to_f64(), i.hi.to_f64())
    }
}

/// Smallest positive integer `m` with `m^d >= q`, for rational `q > 0`.
pub fn ceil_root(q: &BigRational, d: u32) -> BigInt {
    assert!(d >= 1);
    let floor_q = q.floor().to_integer();
    let mut m = if floor_q.is_zero() { BigInt::one() } else { num_integer::Roots::nth_root(&floor_q, d) };
    if m.is_zero() {
        m = BigInt::one();
    }
    let pow = |m: &BigInt| BigRational::from_integer(num_traits::pow::pow(m.clone(), d as usize));
    while m > BigInt::one() && pow(&(&m - 1)) >= *q {
        m -= 1;
    }
    while pow(&m) < *q {
        m += 1;
    }
    m
}
