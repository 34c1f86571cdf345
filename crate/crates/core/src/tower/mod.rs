//! Positive reals of astronomical size, stored as an iterated exponential of a
//! dyadic interval, with certified three-valued comparison.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

mod arith;
pub mod dyadic;
mod expr;
pub mod interval;
mod notation;

pub use dyadic::{Dyadic, Round};
pub use expr::{certify, Certified, Expr};
pub use interval::Interval;
pub use notation::parse_decimal;

use interval::EXP_ARG_LIMIT;

pub const DEFAULT_PREC: u32 = 128;
pub const MAX_PREC: u32 = 4096;

/// Mantissas at height >= 1 are lifted once their upper end reaches 2^64.
const LIFT_BITS: i64 = 64;
/// Mantissas whose upper end is at most this drop one level. Kept below
/// 64 ln 2 so that lifting and dropping never undo each other.
const DROP_AT: i64 = 44;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("input must be positive")]
    NonPositiveInput,
    #[error("logarithm needs a value above one (or below one for the negated form)")]
    DomainError,
    #[error("enclosure too wide to decide at current precision")]
    Undecided,
    #[error("value is outside the representable range")]
    Unrepresentable,
    #[error("cannot parse tower notation: {0}")]
    Parse(String),
}

/// Three-valued comparison outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cmp {
    Less,
    Equal,
    Greater,
    Undecided,
}

impl Cmp {
    pub fn reverse(self) -> Cmp {
        match self {
            Cmp::Less => Cmp::Greater,
            Cmp::Greater => Cmp::Less,
            c => c,
        }
    }

    pub fn is_decided(self) -> bool {
        self != Cmp::Undecided
    }
}

/// `exp^height(mantissa)`, or its reciprocal when `recip` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerReal {
    pub(crate) recip: bool,
    pub(crate) height: u32,
    pub(crate) man: Interval,
    pub(crate) prec: u32,
}

impl TowerReal {
    pub(crate) fn raw(recip: bool, height: u32, man: Interval, prec: u32) -> Self {
        TowerReal { recip, height, man, prec }
    }

    /// Plain positive interval, normalized.
    pub(crate) fn flat(man: Interval, prec: u32) -> Self {
        debug_assert!(man.is_positive());
        TowerReal::raw(false, 0, man, prec).normalize()
    }

    /// Builds `exp^height(mantissa)` (or its reciprocal). A height-0 mantissa must be positive.
    pub fn from_parts(recip: bool, height: u32, mantissa: Interval, prec: u32) -> Result<Self, TowerError> {
        if mantissa.lo > mantissa.hi || (height == 0 && !mantissa.is_positive()) {
            return Err(TowerError::NonPositiveInput);
        }
        Ok(TowerReal::raw(recip, height, mantissa, prec).normalize())
    }

    pub fn from_interval(man: Interval, prec: u32) -> Result<Self, TowerError> {
        TowerReal::from_parts(false, 0, man, prec)
    }

    pub fn from_integer(v: i64) -> Result<Self, TowerError> {
        TowerReal::from_bigint(&BigInt::from(v), DEFAULT_PREC)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Result<Self, TowerError> {
        if !v.is_positive() {
            return Err(TowerError::NonPositiveInput);
        }
        Ok(TowerReal::flat(Interval::from_bigint(v, prec), prec))
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Result<Self, TowerError> {
        if !r.is_positive() {
            return Err(TowerError::NonPositiveInput);
        }
        Ok(TowerReal::flat(Interval::from_rational(r, prec), prec))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self, TowerError> {
        if den == 0 {
            return Err(TowerError::NonPositiveInput);
        }
        TowerReal::from_rational(&BigRational::new(num.into(), den.into()), DEFAULT_PREC)
    }

    pub fn one(prec: u32) -> Self {
        TowerReal::raw(false, 0, Interval::one(), prec)
    }

    pub fn e(prec: u32) -> Self {
        TowerReal::flat(Interval::e(prec), prec)
    }

    pub fn pi(prec: u32) -> Self {
        TowerReal::flat(Interval::pi(prec), prec)
    }

    pub fn ln2(prec: u32) -> Self {
        TowerReal::flat(Interval::ln2(prec), prec)
    }

    /// `k!` for `k >= 0`: exact below 5000, an outward-rounded product up to 10^6,
    /// and a Stirling enclosure beyond.
    pub fn from_factorial(k: &BigInt, prec: u32) -> Result<Self, TowerError> {
        if k.is_negative() {
            return Err(TowerError::NonPositiveInput);
        }
        if let Some(small) = k.to_u64().filter(|&s| s <= 1_000_000) {
            if small <= 5000 {
                let mut acc = BigInt::one();
                for i in 2..=small {
                    acc *= i;
                }
                return TowerReal::from_bigint(&acc, prec);
            }
            let wp = prec + 64;
            let mut lo = Dyadic::one();
            let mut hi = Dyadic::one();
            for i in 2..=small {
                let f = Dyadic::from_int(i as i64);
                lo = lo.mul(&f, wp, Round::Down);
                hi = hi.mul(&f, wp, Round::Up);
            }
            return Ok(TowerReal::flat(Interval::new(lo, hi).round(prec), prec));
        }
        let wp = prec + 64 + k.bits() as u32;
        let n = Interval::from_bigint(k, wp);
        let ln_n = n.ln(wp);
        // ln k! = k ln k - k + ln(2 pi k)/2 + 1/(12k) - theta/(360 k^3), theta in [0, 1].
        let main = n.mul(&ln_n, wp).sub(&n, wp);
        let half_log = Interval::pi(wp).mul_pow2(1).mul(&n, wp).ln(wp).mul_pow2(-1);
        let first = n.scale_int(12, wp).recip(wp);
        let second = n.mul(&n, wp).mul(&n, wp).scale_int(360, wp).recip(wp);
        let corr = Interval::new(first.lo.sub(&second.hi, wp, Round::Down), first.hi);
        let lg = main.add(&half_log, wp).add(&corr, wp).round(prec);
        arith::exp_real(&arith::Real::Flat(lg), prec)
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn is_recip(&self) -> bool {
        self.recip
    }

    pub fn mantissa(&self) -> &Interval {
        &self.man
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Same value with a different working precision for later operations.
    pub fn with_precision(&self, prec: u32) -> Self {
        let man = if prec < self.prec { self.man.round(prec) } else { self.man.clone() };
        TowerReal { man, prec, ..self.clone() }
    }

    pub fn is_flat(&self) -> bool {
        !self.recip && self.height == 0
    }

    /// Enclosure of `ln(value)` when it is a plain interval.
    pub fn ln_interval(&self) -> Option<Interval> {
        match self.ln_r() {
            arith::Real::Flat(i) => Some(i),
            _ => None,
        }
    }

    /// Enclosure of `log10(value)` when it is a plain interval.
    pub fn log10_interval(&self) -> Option<Interval> {
        let ln = self.ln_interval()?;
        let wp = self.prec + 16;
        let ln10 = Interval::from_int(10).ln(wp);
        Some(ln.div(&ln10, wp).round(self.prec))
    }

    /// Rough midpoint as f64 (may overflow to infinity or underflow to zero).
    pub fn approx_f64(&self) -> f64 {
        match self.flatten() {
            Some(i) => i.to_f64_mid(),
            None if self.recip => 0.0,
            None => f64::INFINITY,
        }
    }

    pub(crate) fn normalize(mut self) -> Self {
        if self.recip {
            let base = TowerReal { recip: false, ..self }.normalize();
            if base.recip {
                return TowerReal { recip: false, ..base };
            }
            if base.height == 0 {
                let m = base.man.recip(base.prec);
                return TowerReal::raw(false, 0, m, base.prec).normalize();
            }
            return TowerReal { recip: true, ..base };
        }
        let lift = Dyadic::pow2(LIFT_BITS);
        let drop_at = Dyadic::from_int(DROP_AT);
        let floor = Dyadic::from_int(-EXP_ARG_LIMIT);
        loop {
            if self.height == 0 {
                if self.man.hi >= lift {
                    self.man = self.man.ln(self.prec);
                    self.height = 1;
                    continue;
                }
                if self.man.hi < Dyadic::pow2(-LIFT_BITS) {
                    let base = self.man.recip(self.prec);
                    return TowerReal::raw(true, 0, base, self.prec).normalize();
                }
                return self;
            }
            if self.man.hi >= lift && self.man.lo.is_positive() {
                self.man = self.man.ln(self.prec);
                self.height += 1;
                continue;
            }
            if self.man.hi <= drop_at && self.man.lo >= floor {
                self.man = self.man.exp(self.prec);
                self.height -= 1;
                continue;
            }
            return self;
        }
    }
}

impl Serialize for TowerReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TowerReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn is_exact_one(t: &TowerReal) -> bool {
    t.is_flat() && t.man.is_point() && t.man.lo == Dyadic::one()
}

pub(crate) fn small_exponent(t: &TowerReal) -> Option<u64> {
    if !t.is_flat() || !t.man.is_point() {
        return None;
    }
    t.man.lo.to_bigint().and_then(|b| b.to_u64()).filter(|&k| k <= 1 << 16)
}

pub(crate) fn is_zero_interval(i: &Interval) -> bool {
    i.lo.is_zero() && i.hi.is_zero()
}
