//! Free-group words and simple commutators.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::group::{GroupElement, GroupModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letter x{0} has no assigned element")]
    IndexOutOfRange(usize),
    #[error("cannot parse letter `{0}`")]
    Parse(String),
}

/// Nonzero signed 1-based generator index: `i` is `x_i`, `-i` is `x_i^{-1}`.
pub type Letter = i32;

/// Unreduced word over `x_1, x_2, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letter(i: Letter) -> Word {
        assert!(i != 0, "letters are 1-based");
        Word(vec![i])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v)
    }

    /// Cancels adjacent `x x^{-1}` pairs.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Largest generator index used.
    pub fn rank(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }
}

/// `[g, h] = g^{-1} h^{-1} g h`.
pub fn commutator(g: &Word, h: &Word) -> Word {
    g.inverse().concat(&h.inverse()).concat(g).concat(h)
}

/// `[x_1, ..., x_k]`, built as `[[x_1, ..., x_{k-1}], x_k]`.
pub fn simple_commutator_word(k: usize) -> Word {
    assert!(k >= 1);
    (2..=k).fold(Word::letter(1), |w, i| commutator(&w, &Word::letter(i as Letter)))
}

/// `λ(k) = 3·2^{k-1} − 2`, the unreduced length of a weight-k simple commutator.
pub fn lambda(k: u32) -> BigInt {
    assert!(k >= 1);
    BigInt::from(3) * (BigInt::from(1) << (k - 1)) - 2
}

/// Left-to-right product with `x_i ↦ assignment[i-1]`.
pub fn evaluate_word(g: &GroupModel, w: &Word, assignment: &[GroupElement]) -> Result<GroupElement, WordError> {
    let inverses: Vec<GroupElement> = assignment.iter().map(|a| g.inverse(a)).collect();
    let mut acc = g.identity();
    for &l in &w.0 {
        let i = l.unsigned_abs() as usize;
        if i == 0 || i > assignment.len() {
            return Err(WordError::IndexOutOfRange(i));
        }
        let x = if l > 0 { &assignment[i - 1] } else { &inverses[i - 1] };
        acc = g.compose(&acc, x);
    }
    Ok(acc)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.0.iter().map(|&l| if l > 0 { format!("x{l}") } else { format!("X{}", -l) }).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for Word {
    type Err = WordError;

    /// Whitespace-separated letters `x3` / `X3` (uppercase is the inverse).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split_whitespace()
            .map(|tok| {
                let bad = || WordError::Parse(tok.to_string());
                let (sign, digits) = if let Some(rest) = tok.strip_prefix('x') {
                    (1, rest)
                } else if let Some(rest) = tok.strip_prefix('X') {
                    (-1, rest)
                } else {
                    return Err(bad());
                };
                let i: Letter = digits.parse().map_err(|_| bad())?;
                if i <= 0 {
                    return Err(bad());
                }
                Ok(sign * i)
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}
