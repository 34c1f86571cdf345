//! Small exact-arithmetic helpers shared across modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::tower::{Interval, Round};

pub fn factorial(k: u64) -> BigInt {
    (2..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// `k!! = k (k-2) (k-4) ⋯`.
pub fn double_factorial(k: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut i = k;
    while i > 1 {
        acc *= i;
        i -= 2;
    }
    acc
}

pub fn pow_big(base: &BigInt, e: u64) -> BigInt {
    num_traits::pow(base.clone(), e as usize)
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `num/den`, or just the integer when the denominator is one.
pub fn rat_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal approximation with `digits` significant digits, rounded toward zero.
pub fn rat_decimal(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let i = Interval::from_rational(r, 4 * digits as u32 + 64);
    let dir = if r > &BigRational::zero() { Round::Down } else { Round::Up };
    let d = if dir == Round::Down { &i.lo } else { &i.hi };
    d.to_decimal(digits, dir)
}

/// Parses `num/den` or an integer.
pub fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => s.parse().ok().map(BigRational::from_integer),
    }
}

/// Serde adapter: rational as a `num/den` string.
pub mod serde_rat {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::rat_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rat(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{s}`")))
    }
}

/// Serde adapter: list of rationals as strings.
pub mod serde_rat_vec {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(super::rat_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| super::parse_rat(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{s}`"))))
            .collect()
    }
}

/// Serde adapter: list of big integers as decimal strings.
pub mod serde_int_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(|_| serde::de::Error::custom(format!("bad integer `{s}`"))))
            .collect()
    }
}
