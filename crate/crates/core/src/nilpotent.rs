//! Degree and rank bookkeeping for nilpotent groups, and exact commutator identities
//! checked inside concrete nilpotent matrix groups.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupElement, GroupModel};
use crate::words::{evaluate_word, lambda, simple_commutator_word, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NilpotentError {
    #[error("degree must be at least 2")]
    DegreeTooSmall,
    #[error("expected {expected} entries, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("empty rank vector")]
    EmptyRankVector,
    #[error("cannot parse rank vector `{0}`")]
    Parse(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Torsion-free ranks `r(1..c)` of the lower central quotients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankVector {
    pub r: Vec<u64>,
}

impl RankVector {
    pub fn new(r: Vec<u64>) -> Result<Self, NilpotentError> {
        if r.is_empty() {
            return Err(NilpotentError::EmptyRankVector);
        }
        Ok(RankVector { r })
    }

    /// Class `c`.
    pub fn class(&self) -> usize {
        self.r.len()
    }
}

impl FromStr for RankVector {
    type Err = NilpotentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let r = s
            .split(',')
            .map(|p| p.trim().parse::<u64>().map_err(|_| NilpotentError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        RankVector::new(r)
    }
}

impl fmt::Display for RankVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.r.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Growth degree `Σ i·r(i)`.
pub fn bass_guivarch(rv: &RankVector) -> u64 {
    rv.r.iter().enumerate().map(|(i, r)| (i as u64 + 1) * r).sum()
}

/// Hirsch length `Σ r(i)`.
pub fn hirsch(rv: &RankVector) -> u64 {
    rv.r.iter().sum()
}

/// `h ≤ d ≤ h·c`.
pub fn sandwich_holds(rv: &RankVector) -> bool {
    let (h, d) = (hirsch(rv), bass_guivarch(rv));
    h <= d && d <= h * rv.class() as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionFreeReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

/// Necessary conditions on the ranks of a torsion-free nilpotent group of class `c`:
/// every `r(i) ≥ 1`, and `r(1) ≥ 2` unless the group is cyclic.
pub fn validate_torsion_free(rv: &RankVector, noncyclic: bool) -> TorsionFreeReport {
    let mut violations = Vec::new();
    for (i, &r) in rv.r.iter().enumerate() {
        if r == 0 {
            violations.push(format!("r({}) = 0 but every quotient up to the class must have positive rank", i + 1));
        }
    }
    if noncyclic && rv.r[0] < 2 {
        violations.push(format!("r(1) = {} but a non-cyclic group needs r(1) >= 2", rv.r[0]));
    }
    TorsionFreeReport { valid: violations.is_empty(), violations }
}

/// Largest class `c` with `c(c+1) ≤ 2d − 2`.
pub fn max_class(d: u64) -> Result<u64, NilpotentError> {
    if d < 2 {
        return Err(NilpotentError::DegreeTooSmall);
    }
    let mut c = 1;
    while (c + 1) * (c + 2) <= 2 * d - 2 {
        c += 1;
    }
    Ok(c)
}

/// `g^k` for any integer `k`.
pub fn power(g: &GroupModel, x: &GroupElement, k: i64) -> GroupElement {
    let mut base = if k < 0 { g.inverse(x) } else { x.clone() };
    let mut e = k.unsigned_abs();
    let mut acc = g.identity();
    while e > 0 {
        if e & 1 == 1 {
            acc = g.compose(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = g.compose(&base, &base);
        }
    }
    acc
}

/// Checks `[x_1^{ℓ_1}, …, x_c^{ℓ_c}] = [x_1, …, x_c]^{ℓ_1⋯ℓ_c}` exactly in `g`.
/// Holds whenever `g` is nilpotent of class `c`.
pub fn multilinearity_check(g: &GroupModel, x: &[GroupElement], ell: &[i64]) -> Result<bool, NilpotentError> {
    if x.len() != ell.len() {
        return Err(NilpotentError::ArityMismatch { expected: x.len(), got: ell.len() });
    }
    if x.is_empty() {
        return Err(NilpotentError::ArityMismatch { expected: 1, got: 0 });
    }
    let c = x.len();
    let w = simple_commutator_word(c);
    let powered: Vec<GroupElement> = x.iter().zip(ell).map(|(xi, &l)| power(g, xi, l)).collect();
    let lhs = evaluate_word(g, &w, &powered)?;
    let base = evaluate_word(g, &w, x)?;
    let total: i64 = ell.iter().product();
    let rhs = power(g, &base, total);
    Ok(g.key(&lhs) == g.key(&rhs))
}

/// Writes `k ∈ [1, L^c]` as `Σ_{i≤m} Π_j ℓ_{ij}` with `m ≤ c` and every `ℓ_{ij} ∈ [1, L]`,
/// using the base-`L` digits of `k`.
pub fn commutator_power_decomposition(k: u64, l: u64, c: usize) -> Option<Vec<Vec<u64>>> {
    if k == 0 || l == 0 || c == 0 {
        return None;
    }
    let cap = (l as u128).checked_pow(c as u32)?;
    if k as u128 > cap {
        return None;
    }
    if k as u128 == cap {
        return Some(vec![vec![l; c]]);
    }
    if l == 1 {
        return None;
    }
    let mut terms = Vec::new();
    let mut rest = k;
    let mut pos = 0;
    while rest > 0 {
        let digit = rest % l;
        if digit > 0 {
            // digit · L^pos, spread over the c slots.
            let mut t = vec![1; c];
            t[0] = digit;
            for slot in t.iter_mut().skip(1).take(pos) {
                *slot = l;
            }
            terms.push(t);
        }
        rest /= l;
        pos += 1;
    }
    Some(terms)
}

/// Replaces each letter `x_j^{±1}` of `w` by `x_j^{±ℓ_j}`.
pub fn substitute_powers(w: &Word, ell: &[u64]) -> Word {
    let mut out = Vec::new();
    for &letter in w.letters() {
        let j = letter.unsigned_abs() as usize;
        for _ in 0..ell[j - 1] {
            out.push(letter);
        }
    }
    Word(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutatorPowerReport {
    pub k: u64,
    pub l: u64,
    pub terms: Vec<Vec<u64>>,
    pub word_length: usize,
    pub length_bound: String,
    pub within_bound: bool,
    pub identity_holds: bool,
}

/// Builds the word for `[x_1,…,x_c]^k` as a product of at most `c` commutators of powers and
/// checks its length against `c·λ(c)·L` and its value against the direct power in `g`.
pub fn commutator_power_check(
    g: &GroupModel,
    x: &[GroupElement],
    k: u64,
    l: u64,
) -> Result<Option<CommutatorPowerReport>, NilpotentError> {
    let c = x.len();
    let Some(terms) = commutator_power_decomposition(k, l, c) else {
        return Ok(None);
    };
    let base = simple_commutator_word(c);
    let mut word = Word::empty();
    for t in &terms {
        word = word.concat(&substitute_powers(&base, t));
    }
    let bound = BigInt::from(c) * lambda(c as u32) * BigInt::from(l);
    let lhs = evaluate_word(g, &word, x)?;
    let rhs = power(g, &evaluate_word(g, &base, x)?, k as i64);
    Ok(Some(CommutatorPowerReport {
        k,
        l,
        word_length: word.len(),
        within_bound: BigInt::from(word.len()) <= bound,
        length_bound: bound.to_string(),
        identity_holds: g.key(&lhs) == g.key(&rhs),
        terms,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultilinearityReport {
    pub trials: usize,
    pub passed: usize,
    pub failures: Vec<Vec<i64>>,
}

/// Runs `multilinearity_check` on `trials` exponent vectors drawn uniformly from `[-max_abs, max_abs]^c`.
pub fn random_multilinearity(
    g: &GroupModel,
    x: &[GroupElement],
    trials: usize,
    max_abs: i64,
    seed: u64,
) -> Result<MultilinearityReport, NilpotentError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..trials {
        let ell: Vec<i64> = x.iter().map(|_| rng.gen_range(-max_abs..=max_abs)).collect();
        if !multilinearity_check(g, x, &ell)? {
            failures.push(ell);
        }
    }
    Ok(MultilinearityReport { trials, passed: trials - failures.len(), failures })
}
