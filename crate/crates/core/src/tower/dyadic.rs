//! Binary floating-point numbers `man * 2^exp` with arbitrary-size mantissa and
//! explicit directed rounding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for a single operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// `man * 2^exp`, normalized so that `man` is odd (or zero with `exp == 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

fn floor_shift(x: &BigInt, k: u64) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    let d = BigInt::one() << k;
    x.div_floor(&d)
}

fn ceil_shift(x: &BigInt, k: u64) -> BigInt {
    -floor_shift(&-x, k)
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { man: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    pub fn new(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Dyadic::zero();
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        Dyadic { man: man >> tz, exp: exp + tz as i64 }
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Dyadic::new(v.clone(), 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic { man: BigInt::one(), exp: e }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Bits in the mantissa.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// Position of the leading bit: `2^top <= |x| < 2^(top+1)`. Undefined for zero.
    pub fn top(&self) -> i64 {
        self.exp + self.man.bits() as i64 - 1
    }

    pub fn neg(&self) -> Self {
        Dyadic { man: -&self.man, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        Dyadic { man: self.man.abs(), exp: self.exp }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { man: self.man.clone(), exp: self.exp + k }
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0 || self.is_zero()
    }

    /// Exact integer value if `self` is an integer.
    pub fn to_bigint(&self) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        if self.exp < 0 {
            return None;
        }
        Some(&self.man << self.exp as u64)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            floor_shift(&self.man, (-self.exp) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            ceil_shift(&self.man, (-self.exp) as u64)
        }
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as u64)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Nearest `f64` (saturating); only for display and diagnostics.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits() as i64;
        let shift = (bits - 60).max(0);
        let m = (&self.man >> shift as u64).to_f64().unwrap_or(0.0);
        let e = self.exp + shift;
        if e > 2000 {
            return if m > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if e < -2000 {
            return 0.0;
        }
        m * 2f64.powi(e as i32)
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let k = bits - prec as u64;
        let m = match dir {
            Round::Down => floor_shift(&self.man, k),
            Round::Up => ceil_shift(&self.man, k),
        };
        Dyadic::new(m, self.exp + k as i64)
    }

    pub fn add_exact(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &other.man << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    /// Rounded sum. Tiny addends far below the rounding position are replaced by
    /// a sticky bound of the correct sign, so huge exponent gaps stay cheap.
    pub fn add(&self, other: &Self, prec: u32, dir: Round) -> Self {
        if self.is_zero() {
            return other.round(prec, dir);
        }
        if other.is_zero() {
            return self.round(prec, dir);
        }
        let (big, small) = if self.top() >= other.top() { (self, other) } else { (other, self) };
        let cutoff = big.top() - prec as i64 - 8;
        if small.top() < cutoff {
            // |small| < 2^cutoff: swap in a bound on the correct side of it.
            let sticky = Dyadic::pow2(cutoff);
            let replaced = match (small.is_positive(), dir) {
                (true, Round::Down) | (false, Round::Up) => Dyadic::zero(),
                (true, Round::Up) => sticky,
                (false, Round::Down) => sticky.neg(),
            };
            return big.add_exact(&replaced).round(prec, dir);
        }
        self.add_exact(other).round(prec, dir)
    }

    pub fn sub(&self, other: &Self, prec: u32, dir: Round) -> Self {
        self.add(&other.neg(), prec, dir)
    }

    pub fn mul_exact(&self, other: &Self) -> Self {
        Dyadic::new(&self.man * &other.man, self.exp + other.exp)
    }

    pub fn mul(&self, other: &Self, prec: u32, dir: Round) -> Self {
        self.mul_exact(other).round(prec, dir)
    }

    /// Rounded quotient. Panics on division by zero.
    pub fn div(&self, other: &Self, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // Scale the numerator so the integer quotient carries prec + 2 bits.
        let shift = (prec as i64 + 2 + other.man.bits() as i64 - self.man.bits() as i64).max(0);
        let num = &self.man << shift as u64;
        let (q, r) = num.div_mod_floor(&other.man);
        // q = floor(num / den) when den > 0; with den < 0 div_mod_floor still floors.
        let q = match dir {
            Round::Down => q,
            Round::Up => {
                if r.is_zero() {
                    q
                } else {
                    q + 1
                }
            }
        };
        Dyadic::new(q, self.exp - other.exp - shift).round(prec, dir)
    }

    pub fn from_rational(r: &BigRational, prec: u32, dir: Round) -> Self {
        Dyadic::from_bigint(r.numer()).div(&Dyadic::from_bigint(r.denom()), prec, dir)
    }

    /// Rounded square root of a non-negative value.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Self {
        assert!(!self.is_negative(), "sqrt of negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let mut shift = (2 * (prec as i64 + 2) - self.man.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m: BigUint = (&self.man << shift as u64).to_biguint().expect("non-negative");
        let s = m.sqrt();
        let exact = &s * &s == m;
        let s = BigInt::from(s);
        let s = match dir {
            Round::Up if !exact => s + 1,
            _ => s,
        };
        Dyadic::new(s, (self.exp - shift) / 2).round(prec, dir)
    }

    /// Decimal rendering with `digits` significant digits, rounded in direction `dir`.
    pub fn to_decimal(&self, digits: usize, dir: Round) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let r = self.to_rational();
        let neg = r.is_negative();
        let a = r.abs();
        // Magnitude estimate: 10^k <= a < 10^(k+1).
        let approx = (self.top() as f64) * std::f64::consts::LOG10_2;
        let mut k = approx.floor() as i64;
        let ten = BigRational::from_integer(BigInt::from(10));
        let pow10 = |e: i64| -> BigRational {
            if e >= 0 {
                num_traits::pow::pow(ten.clone(), e as usize)
            } else {
                BigRational::one() / num_traits::pow::pow(ten.clone(), (-e) as usize)
            }
        };
        while pow10(k) > a {
            k -= 1;
        }
        while pow10(k + 1) <= a {
            k += 1;
        }
        // Scaled integer with `digits` significant digits.
        let scaled = &a / pow10(k + 1 - digits as i64);
        // For a negative number rounding down grows the magnitude.
        let mag_dir = if neg { dir.flip() } else { dir };
        let mut n = match mag_dir {
            Round::Down => scaled.floor().to_integer(),
            Round::Up => scaled.ceil().to_integer(),
        };
        if n.to_string().len() > digits {
            n /= 10;
            k += 1;
        }
        let s = n.to_string();
        let sign = if neg { "-" } else { "" };
        let point = k + 1;
        if (-5..=20).contains(&k) {
            let body = if point >= s.len() as i64 {
                format!("{s}{}", "0".repeat((point - s.len() as i64) as usize))
            } else if point > 0 {
                let (i, f) = s.split_at(point as usize);
                let f = f.trim_end_matches('0');
                if f.is_empty() { i.to_string() } else { format!("{i}.{f}") }
            } else {
                format!("0.{}{}", "0".repeat((-point) as usize), s.trim_end_matches('0'))
            };
            return format!("{sign}{body}");
        }
        let (head, tail) = s.split_at(1);
        let tail = tail.trim_end_matches('0');
        let body = if tail.is_empty() { head.to_string() } else { format!("{head}.{tail}") };
        format!("{sign}{body}e{k}")
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // Same sign: compare leading-bit positions first to avoid huge shifts.
        let (ta, tb) = (self.top(), other.top());
        if ta != tb {
            let mag = ta.cmp(&tb);
            return if sa > 0 { mag } else { mag.reverse() };
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &other.man << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20, Round::Down))
    }
}
