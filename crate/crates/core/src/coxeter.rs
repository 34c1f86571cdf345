//! Growth series of affine Coxeter groups from their exponents.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{epsilon_d, EpsilonReport};
use crate::exact::{factorial, rat_string};
use crate::tower::{Cmp, TowerReal, DEFAULT_PREC};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoxeterError {
    #[error("unknown Coxeter family `{0}`")]
    UnknownFamily(String),
    #[error("invalid exponents: {0}")]
    InvalidDatum(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterDatum {
    pub name: String,
    pub rank: usize,
    pub exponents: Vec<u64>,
}

impl CoxeterDatum {
    pub fn new(name: &str, exponents: Vec<u64>) -> Result<Self, CoxeterError> {
        if exponents.is_empty() || exponents.contains(&0) {
            return Err(CoxeterError::InvalidDatum(format!("{exponents:?}")));
        }
        if exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoxeterError::InvalidDatum(format!("{exponents:?} not increasing")));
        }
        Ok(CoxeterDatum { name: name.to_string(), rank: exponents.len(), exponents })
    }
}

/// Cumulative ball sizes `s_0..s_N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthSeries {
    #[serde(with = "crate::exact::serde_int_vec")]
    pub coefficients: Vec<BigInt>,
}

impl GrowthSeries {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }
}

fn mul_one_minus(p: &mut [BigInt], k: usize) {
    for i in (k..p.len()).rev() {
        let t = p[i - k].clone();
        p[i] -= t;
    }
}

fn div_one_minus(p: &mut [BigInt], k: usize) {
    for i in k..p.len() {
        let t = p[i - k].clone();
        p[i] += t;
    }
}

/// Coefficients of `(1−z)^{-(d+1)} ∏ (1−z^{m_i+1})/(1−z^{m_i})` up to `z^N`.
pub fn bott_cumulative_series(datum: &CoxeterDatum, n: usize) -> GrowthSeries {
    let mut p = vec![BigInt::zero(); n + 1];
    p[0] = BigInt::one();
    for &m in &datum.exponents {
        mul_one_minus(&mut p, m as usize + 1);
        div_one_minus(&mut p, m as usize);
    }
    for _ in 0..=datum.rank {
        div_one_minus(&mut p, 1);
    }
    GrowthSeries { coefficients: p }
}

/// `(1/d!) ∏ (m_i+1)/m_i`.
pub fn asymptotic_constant(datum: &CoxeterDatum) -> BigRational {
    let prod = datum
        .exponents
        .iter()
        .fold(BigRational::one(), |acc, &m| acc * BigRational::new(BigInt::from(m + 1), BigInt::from(m)));
    prod / BigRational::from_integer(factorial(datum.rank as u64))
}

/// Named affine family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Btilde(usize),
    Gtilde2,
    Etilde6,
    Etilde7,
    Etilde8,
}

impl Family {
    pub fn exponents(self) -> Vec<u64> {
        match self {
            Family::Btilde(d) => (1..=d as u64).map(|i| 2 * i - 1).collect(),
            Family::Gtilde2 => vec![1, 5],
            Family::Etilde6 => vec![1, 4, 5, 7, 8, 11],
            Family::Etilde7 => vec![1, 5, 7, 9, 11, 13, 17],
            Family::Etilde8 => vec![1, 7, 11, 13, 17, 19, 23, 29],
        }
    }

    pub fn rank(self) -> usize {
        match self {
            Family::Btilde(d) => d,
            Family::Gtilde2 => 2,
            Family::Etilde6 => 6,
            Family::Etilde7 => 7,
            Family::Etilde8 => 8,
        }
    }

    /// Exceptional families, for the registry.
    pub const EXCEPTIONAL: [Family; 4] = [Family::Gtilde2, Family::Etilde6, Family::Etilde7, Family::Etilde8];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Btilde(d) => write!(f, "Btilde({d})"),
            Family::Gtilde2 => f.write_str("Gtilde2"),
            Family::Etilde6 => f.write_str("Etilde6"),
            Family::Etilde7 => f.write_str("Etilde7"),
            Family::Etilde8 => f.write_str("Etilde8"),
        }
    }
}

impl FromStr for Family {
    type Err = CoxeterError;

    /// `Btilde(3)`, `Btilde:3`, `Btilde3`, `Gtilde2`, `Etilde6`, ... (case-insensitive).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CoxeterError::UnknownFamily(s.to_string());
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "gtilde2" | "g2" => return Ok(Family::Gtilde2),
            "etilde6" | "e6" => return Ok(Family::Etilde6),
            "etilde7" | "e7" => return Ok(Family::Etilde7),
            "etilde8" | "e8" => return Ok(Family::Etilde8),
            _ => {}
        }
        let rest = t.strip_prefix("btilde").or_else(|| t.strip_prefix('b')).ok_or_else(bad)?;
        let rest = rest.trim_start_matches([':', '(']).trim_end_matches(')');
        let d: usize = rest.parse().map_err(|_| bad())?;
        if d < 2 {
            return Err(bad());
        }
        Ok(Family::Btilde(d))
    }
}

/// Known constants the exceptional tables must reproduce, as `(numerator, denominator)` of `d!·constant`.
const EXCEPTIONAL_CHECK: [(Family, u64, u64); 4] = [
    (Family::Gtilde2, 12, 5),
    (Family::Etilde6, 324, 77),
    (Family::Etilde7, 9216, 2431),
    (Family::Etilde8, 99532800, 30808063),
];

fn validated_tables() -> &'static () {
    static CHECK: OnceLock<()> = OnceLock::new();
    CHECK.get_or_init(|| {
        for (fam, num, den) in EXCEPTIONAL_CHECK {
            let datum = CoxeterDatum::new(&fam.to_string(), fam.exponents()).expect("table");
            let got = asymptotic_constant(&datum) * BigRational::from_integer(factorial(fam.rank() as u64));
            let want = BigRational::new(BigInt::from(num), BigInt::from(den));
            assert_eq!(got, want, "exponent table for {fam} is wrong");
        }
    })
}

pub fn builtin_family(f: Family) -> CoxeterDatum {
    validated_tables();
    CoxeterDatum::new(&f.to_string(), f.exponents()).expect("builtin tables are valid")
}

pub fn builtin(name: &str) -> Result<CoxeterDatum, CoxeterError> {
    Ok(builtin_family(name.parse()?))
}

/// Built-in data of rank `d`.
pub fn builtins_of_rank(d: usize) -> Vec<CoxeterDatum> {
    let mut out = Vec::new();
    if d >= 2 {
        out.push(builtin_family(Family::Btilde(d)));
    }
    out.extend(Family::EXCEPTIONAL.iter().filter(|f| f.rank() == d).map(|&f| builtin_family(f)));
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MgWindow {
    pub d: usize,
    pub c: u64,
    pub lower: EpsilonReport,
    #[serde(with = "crate::exact::serde_rat")]
    pub upper: BigRational,
    pub upper_source: String,
    /// Certified comparison of the lower end with the upper end.
    pub ordered: Cmp,
}

/// Known window for `mg(d)`: `ε_d ≤ mg(d) ≤ min(2^d/d!, builtin constants of rank d)`.
pub fn mg_window(d: usize, c: u64) -> MgWindow {
    assert!(d >= 1);
    let mut upper = BigRational::new(BigInt::one() << d, factorial(d as u64));
    let mut upper_source = format!("Z^{d}");
    for datum in builtins_of_rank(d) {
        let v = asymptotic_constant(&datum);
        if v < upper {
            upper = v;
            upper_source = datum.name.clone();
        }
    }
    let lower = epsilon_d(d as u64, c);
    let ordered = match (&lower.value, TowerReal::from_rational(&upper, DEFAULT_PREC)) {
        (Some(l), Ok(u)) => l.compare(&u),
        _ => Cmp::Undecided,
    };
    MgWindow { d, c, lower, upper, upper_source, ordered }
}

/// Upper end of the window as `num/den`.
pub fn upper_string(w: &MgWindow) -> String {
    rat_string(&w.upper)
}
