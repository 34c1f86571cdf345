use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{Dyadic, Interval, Round, TowerError, TowerReal, DEFAULT_PREC};

const DIGITS: usize = 20;

impl fmt::Display for TowerReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.recip {
            f.write_str("1/")?;
        }
        write!(
            f,
            "E^{}[{},{}]",
            self.height,
            self.man.lo.to_decimal(DIGITS, Round::Down),
            self.man.hi.to_decimal(DIGITS, Round::Up)
        )
    }
}

/// Parses a decimal literal such as `-12.5e-3` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational, TowerError> {
    let bad = || TowerError::Parse(format!("bad decimal `{s}`"));
    let s = s.trim();
    let (body, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match body.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, body.strip_prefix('+').unwrap_or(body)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i64;
    if scale.unsigned_abs() > 1_000_000 {
        return Err(bad());
    }
    let ten = BigInt::from(10);
    let p = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Ok(if scale >= 0 { BigRational::from_integer(num * p) } else { BigRational::new(num, p) })
}

impl FromStr for TowerReal {
    type Err = TowerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: &str| TowerError::Parse(format!("{m} in `{s}`"));
        let t = s.trim();
        let (recip, t) = match t.strip_prefix("1/") {
            Some(rest) => (true, rest.trim()),
            None => (false, t),
        };
        let t = t.strip_prefix("E^").ok_or_else(|| bad("missing `E^`"))?;
        let open = t.find(['[', '(']).ok_or_else(|| bad("missing mantissa"))?;
        let height: u32 = t[..open].trim().parse().map_err(|_| bad("bad height"))?;
        let inner = t[open + 1..].trim_end();
        let inner = inner.strip_suffix([']', ')']).ok_or_else(|| bad("unclosed mantissa"))?;
        let (lo, hi) = match inner.split_once(',') {
            Some((a, b)) => (parse_decimal(a)?, parse_decimal(b)?),
            None => {
                let v = parse_decimal(inner)?;
                (v.clone(), v)
            }
        };
        if lo > hi {
            return Err(bad("inverted interval"));
        }
        let prec = DEFAULT_PREC;
        let man = Interval::new(
            Dyadic::from_rational(&lo, prec, Round::Down),
            Dyadic::from_rational(&hi, prec, Round::Up),
        );
        TowerReal::from_parts(recip, height, man, prec)
    }
}
