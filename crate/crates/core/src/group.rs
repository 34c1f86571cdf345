//! Concrete finitely generated groups with exact element arithmetic and
//! breadth-first enumeration of Cayley balls.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("generator {index} has determinant {det}, not +1 or -1")]
    NonInvertibleGenerator { index: usize, det: String },
    #[error("generator list is empty")]
    EmptyGeneratorSet,
    #[error("generator {index} is the identity")]
    IdentityGenerator { index: usize },
    #[error("generator {index} is not a {dimension}x{dimension} matrix")]
    DimensionMismatch { index: usize, dimension: usize },
    #[error("element budget exceeded; largest completed radius is {completed_radius}")]
    BudgetExceeded { completed_radius: usize },
    #[error("unknown built-in group `{0}`")]
    UnknownBuiltin(String),
    #[error("invalid group specification: {0}")]
    InvalidSpec(String),
}

/// Matrix entry in a group-spec file: a decimal string (for big values) or a JSON integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Text(String),
    Int(i64),
}

/// Row-major matrix, either nested by rows or flat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixJson {
    Rows(Vec<Vec<EntryJson>>),
    Flat(Vec<EntryJson>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum GroupSpec {
    IntegerMatrixGroup { dimension: usize, generators: Vec<MatrixJson> },
    FreeAbelian { rank: usize },
    DirectProduct { factors: Vec<GroupSpec> },
    FiniteCyclic { order: u64 },
}

/// Square integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![BigInt::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = BigInt::one();
        }
        IntMatrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        let data = rows.iter().flat_map(|r| r.iter().map(|&v| BigInt::from(v))).collect::<Vec<_>>();
        assert_eq!(data.len(), n * n, "matrix must be square");
        IntMatrix { n, data }
    }

    pub fn from_entries(n: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), n * n);
        IntMatrix { n, data }
    }

    /// Elementary unipotent matrix `1 + e_{ij}` with 1-based indices.
    pub fn elementary(n: usize, i: usize, j: usize) -> Self {
        let mut m = IntMatrix::identity(n);
        m.data[(i - 1) * n + (j - 1)] += 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry at 1-based position (i, j).
    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.data[(i - 1) * self.n + (j - 1)]
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let mut data = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &o.data[k * n + j];
                    if !b.is_zero() {
                        data[i * n + j] += a * b;
                    }
                }
            }
        }
        IntMatrix { n, data }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    /// Inverse over the integers; `None` unless the determinant is a unit.
    pub fn inverse(&self) -> Option<IntMatrix> {
        let n = self.n;
        let mut a: Vec<BigRational> = self.data.iter().map(|v| BigRational::from_integer(v.clone())).collect();
        let mut inv: Vec<BigRational> = IntMatrix::identity(n).data.into_iter().map(BigRational::from_integer).collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r * n + c].is_zero())?;
            for j in 0..n {
                a.swap(c * n + j, p * n + j);
                inv.swap(c * n + j, p * n + j);
            }
            let piv = a[c * n + c].clone();
            for j in 0..n {
                a[c * n + j] = &a[c * n + j] / &piv;
                inv[c * n + j] = &inv[c * n + j] / &piv;
            }
            for r in 0..n {
                if r == c || a[r * n + c].is_zero() {
                    continue;
                }
                let f = a[r * n + c].clone();
                for j in 0..n {
                    let (x, y) = (&a[c * n + j] * &f, &inv[c * n + j] * &f);
                    a[r * n + j] -= x;
                    inv[r * n + j] -= y;
                }
            }
        }
        let data = inv.into_iter().map(|q| q.is_integer().then(|| q.to_integer())).collect::<Option<Vec<_>>>()?;
        Some(IntMatrix { n, data })
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.n)
    }

    fn key_into(&self, out: &mut Vec<u8>) {
        for v in &self.data {
            push_int(out, v);
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for j in 0..self.n {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.data[i * self.n + j])?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

fn push_int(out: &mut Vec<u8>, v: &BigInt) {
    let bytes = v.to_signed_bytes_be();
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(&bytes);
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Matrix(IntMatrix),
    Lattice(Vec<i64>),
    Residue(u64),
    Product(Vec<GroupElement>),
}

impl GroupElement {
    pub fn as_matrix(&self) -> Option<&IntMatrix> {
        match self {
            GroupElement::Matrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_lattice(&self) -> Option<&[i64]> {
        match self {
            GroupElement::Lattice(v) => Some(v),
            _ => None,
        }
    }

    /// Canonical byte key: equal keys iff equal elements (within one group).
    pub fn key(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.key_into(&mut out);
        out
    }

    fn key_into(&self, out: &mut Vec<u8>) {
        match self {
            GroupElement::Matrix(m) => m.key_into(out),
            GroupElement::Lattice(v) => {
                for &x in v {
                    push_int(out, &BigInt::from(x));
                }
            }
            GroupElement::Residue(r) => push_int(out, &BigInt::from(*r)),
            GroupElement::Product(fs) => {
                for f in fs {
                    let mut sub = Vec::new();
                    f.key_into(&mut sub);
                    out.extend_from_slice(&(sub.len() as u32).to_be_bytes());
                    out.extend_from_slice(&sub);
                }
            }
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Matrix(m) => write!(f, "{m}"),
            GroupElement::Lattice(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            GroupElement::Residue(r) => write!(f, "{r}"),
            GroupElement::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|x| x.to_string()).collect();
                write!(f, "<{}>", parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Matrix(usize),
    Lattice(usize),
    Cyclic(u64),
    Product(Vec<Kind>),
}

impl Kind {
    fn identity(&self) -> GroupElement {
        match self {
            Kind::Matrix(n) => GroupElement::Matrix(IntMatrix::identity(*n)),
            Kind::Lattice(d) => GroupElement::Lattice(vec![0; *d]),
            Kind::Cyclic(_) => GroupElement::Residue(0),
            Kind::Product(ks) => GroupElement::Product(ks.iter().map(Kind::identity).collect()),
        }
    }

    fn compose(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match (self, g, h) {
            (Kind::Matrix(_), GroupElement::Matrix(a), GroupElement::Matrix(b)) => GroupElement::Matrix(a.mul(b)),
            (Kind::Lattice(_), GroupElement::Lattice(a), GroupElement::Lattice(b)) => {
                GroupElement::Lattice(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Kind::Cyclic(k), GroupElement::Residue(a), GroupElement::Residue(b)) => {
                GroupElement::Residue(((*a as u128 + *b as u128) % *k as u128) as u64)
            }
            (Kind::Product(ks), GroupElement::Product(a), GroupElement::Product(b)) => {
                GroupElement::Product(ks.iter().zip(a.iter().zip(b)).map(|(k, (x, y))| k.compose(x, y)).collect())
            }
            _ => panic!("element does not belong to this group"),
        }
    }

    fn inverse(&self, g: &GroupElement) -> GroupElement {
        match (self, g) {
            (Kind::Matrix(_), GroupElement::Matrix(a)) => {
                GroupElement::Matrix(a.inverse().expect("group elements are unimodular"))
            }
            (Kind::Lattice(_), GroupElement::Lattice(a)) => GroupElement::Lattice(a.iter().map(|x| -x).collect()),
            (Kind::Cyclic(k), GroupElement::Residue(a)) => GroupElement::Residue((k - a % k) % k),
            (Kind::Product(ks), GroupElement::Product(a)) => {
                GroupElement::Product(ks.iter().zip(a).map(|(k, x)| k.inverse(x)).collect())
            }
            _ => panic!("element does not belong to this group"),
        }
    }

    fn contains(&self, g: &GroupElement) -> bool {
        match (self, g) {
            (Kind::Matrix(n), GroupElement::Matrix(m)) => m.dim() == *n,
            (Kind::Lattice(d), GroupElement::Lattice(v)) => v.len() == *d,
            (Kind::Cyclic(k), GroupElement::Residue(r)) => r < k,
            (Kind::Product(ks), GroupElement::Product(fs)) => {
                ks.len() == fs.len() && ks.iter().zip(fs).all(|(k, f)| k.contains(f))
            }
            _ => false,
        }
    }
}

/// A group with a fixed symmetric generating set.
#[derive(Debug, Clone)]
pub struct GroupModel {
    kind: Kind,
    raw_generators: Vec<GroupElement>,
    generators: Vec<GroupElement>,
    identity_key: Vec<u8>,
}

impl GroupModel {
    pub fn identity(&self) -> GroupElement {
        self.kind.identity()
    }

    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.kind.compose(g, h)
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        self.kind.inverse(g)
    }

    pub fn key(&self, g: &GroupElement) -> Vec<u8> {
        g.key()
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        g.key() == self.identity_key
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.kind.contains(g)
    }

    /// Generators as supplied (before symmetrization).
    pub fn supplied_generators(&self) -> &[GroupElement] {
        &self.raw_generators
    }

    /// The symmetric generating set `X ∪ X^{-1}` without duplicates.
    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    /// Valency of the Cayley graph: distinct non-identity symmetric generators.
    pub fn valency(&self) -> usize {
        self.generators.len()
    }

    fn from_kind(kind: Kind, raw: Vec<GroupElement>) -> Result<Self, GroupError> {
        if raw.is_empty() {
            return Err(GroupError::EmptyGeneratorSet);
        }
        let identity_key = kind.identity().key();
        let mut seen = HashSet::new();
        let mut generators = Vec::new();
        for (index, g) in raw.iter().enumerate() {
            if g.key() == identity_key {
                return Err(GroupError::IdentityGenerator { index });
            }
            for h in [g.clone(), kind.inverse(g)] {
                if seen.insert(h.key()) {
                    generators.push(h);
                }
            }
        }
        Ok(GroupModel { kind, raw_generators: raw, generators, identity_key })
    }
}

fn parse_entry(e: &EntryJson) -> Result<BigInt, GroupError> {
    match e {
        EntryJson::Int(v) => Ok(BigInt::from(*v)),
        EntryJson::Text(s) => s.trim().parse().map_err(|_| GroupError::InvalidSpec(format!("bad matrix entry `{s}`"))),
    }
}

fn parse_matrix(m: &MatrixJson, n: usize, index: usize) -> Result<IntMatrix, GroupError> {
    let mismatch = GroupError::DimensionMismatch { index, dimension: n };
    let data = match m {
        MatrixJson::Rows(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(mismatch);
            }
            rows.iter().flatten().map(parse_entry).collect::<Result<Vec<_>, _>>()?
        }
        MatrixJson::Flat(v) => {
            if v.len() != n * n {
                return Err(mismatch);
            }
            v.iter().map(parse_entry).collect::<Result<Vec<_>, _>>()?
        }
    };
    Ok(IntMatrix::from_entries(n, data))
}

fn build_parts(spec: &GroupSpec) -> Result<(Kind, Vec<GroupElement>), GroupError> {
    match spec {
        GroupSpec::IntegerMatrixGroup { dimension, generators } => {
            if *dimension == 0 {
                return Err(GroupError::InvalidSpec("dimension must be positive".into()));
            }
            let mut gens = Vec::new();
            for (index, m) in generators.iter().enumerate() {
                let mat = parse_matrix(m, *dimension, index)?;
                let det = mat.det();
                if det.abs() != BigInt::one() {
                    return Err(GroupError::NonInvertibleGenerator { index, det: det.to_string() });
                }
                gens.push(GroupElement::Matrix(mat));
            }
            Ok((Kind::Matrix(*dimension), gens))
        }
        GroupSpec::FreeAbelian { rank } => {
            if *rank == 0 {
                return Err(GroupError::EmptyGeneratorSet);
            }
            let gens = (0..*rank)
                .map(|i| {
                    let mut v = vec![0; *rank];
                    v[i] = 1;
                    GroupElement::Lattice(v)
                })
                .collect();
            Ok((Kind::Lattice(*rank), gens))
        }
        GroupSpec::FiniteCyclic { order } => {
            if *order == 0 {
                return Err(GroupError::InvalidSpec("order must be positive".into()));
            }
            Ok((Kind::Cyclic(*order), vec![GroupElement::Residue(1 % order)]))
        }
        GroupSpec::DirectProduct { factors } => {
            if factors.is_empty() {
                return Err(GroupError::EmptyGeneratorSet);
            }
            let parts = factors.iter().map(build_parts).collect::<Result<Vec<_>, _>>()?;
            let kinds: Vec<Kind> = parts.iter().map(|(k, _)| k.clone()).collect();
            let ids: Vec<GroupElement> = kinds.iter().map(Kind::identity).collect();
            let mut gens = Vec::new();
            for (i, (_, gs)) in parts.iter().enumerate() {
                for g in gs {
                    let mut v = ids.clone();
                    v[i] = g.clone();
                    gens.push(GroupElement::Product(v));
                }
            }
            Ok((Kind::Product(kinds), gens))
        }
    }
}

pub fn build_group(spec: &GroupSpec) -> Result<GroupModel, GroupError> {
    let (kind, gens) = build_parts(spec)?;
    GroupModel::from_kind(kind, gens)
}

/// Spec for the `n x n` upper unitriangular group generated by `E_{i,i+1}`.
pub fn unitriangular_spec(n: usize) -> GroupSpec {
    let generators = (1..n)
        .map(|i| {
            let m = IntMatrix::elementary(n, i, i + 1);
            MatrixJson::Rows(
                (0..n).map(|r| (0..n).map(|c| EntryJson::Text(m.entry(r + 1, c + 1).to_string())).collect()).collect(),
            )
        })
        .collect();
    GroupSpec::IntegerMatrixGroup { dimension: n, generators }
}

/// Spec for the infinite dihedral group as 2x2 integer matrices.
pub fn infinite_dihedral_spec() -> GroupSpec {
    let m = |a: i64, b: i64| MatrixJson::Rows(vec![vec![EntryJson::Int(a), EntryJson::Int(b)], vec![EntryJson::Int(0), EntryJson::Int(1)]]);
    GroupSpec::IntegerMatrixGroup { dimension: 2, generators: vec![m(-1, 0), m(-1, 1)] }
}

/// Resolves `builtin:zd:<d>`, `builtin:heisenberg`, `builtin:ut:<n>`, `builtin:cyclic:<k>`, `builtin:dinf`.
pub fn builtin_spec(name: &str) -> Result<GroupSpec, GroupError> {
    let unknown = || GroupError::UnknownBuiltin(name.to_string());
    let rest = name.strip_prefix("builtin:").ok_or_else(unknown)?;
    let mut parts = rest.split(':');
    let family = parts.next().ok_or_else(unknown)?;
    let arg = parts.next();
    if parts.next().is_some() {
        return Err(unknown());
    }
    let num = |a: Option<&str>| a.and_then(|s| s.parse::<u64>().ok()).filter(|&v| v > 0).ok_or_else(unknown);
    match family {
        "zd" => Ok(GroupSpec::FreeAbelian { rank: num(arg)? as usize }),
        "heisenberg" if arg.is_none() => Ok(unitriangular_spec(3)),
        "ut" => {
            let n = num(arg)? as usize;
            if n < 2 {
                return Err(unknown());
            }
            Ok(unitriangular_spec(n))
        }
        "cyclic" => Ok(GroupSpec::FiniteCyclic { order: num(arg)? }),
        "dinf" if arg.is_none() => Ok(infinite_dihedral_spec()),
        _ => Err(unknown()),
    }
}

pub fn builtin(name: &str) -> Result<GroupModel, GroupError> {
    build_group(&builtin_spec(name)?)
}

/// Cumulative ball sizes `s_0..s_R` and sphere sizes `a_1..a_R`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallProfile {
    pub radius: usize,
    pub cumulative: Vec<u64>,
    pub spheres: Vec<u64>,
    pub exhausted: bool,
}

impl BallProfile {
    /// `s_n`.
    pub fn s(&self, n: usize) -> u64 {
        self.cumulative[n]
    }

    /// `a_n = s_n - s_{n-1}` for `n >= 1`.
    pub fn a(&self, n: usize) -> u64 {
        self.spheres[n - 1]
    }
}

/// The enumerated ball itself, ordered by distance from the identity.
#[derive(Debug, Clone)]
pub struct Ball {
    pub elements: Vec<GroupElement>,
    /// `sphere_starts[n]` is the index of the first element at distance `n`; one extra end marker.
    pub sphere_starts: Vec<usize>,
    pub profile: BallProfile,
}

impl Ball {
    /// Elements at distance at most `n`.
    pub fn within(&self, n: usize) -> &[GroupElement] {
        let end = self.sphere_starts[(n + 1).min(self.sphere_starts.len() - 1)];
        &self.elements[..end]
    }
}

const PAR_THRESHOLD: usize = 2048;

/// Breadth-first enumeration of the radius-`r` ball. Output is independent of thread count.
pub fn enumerate_ball(g: &GroupModel, r: usize, budget: usize) -> Result<Ball, GroupError> {
    let id = g.identity();
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    seen.insert(id.key());
    let mut elements = vec![id];
    let mut sphere_starts = vec![0, 1];
    let mut exhausted = false;
    for radius in 1..=r {
        let (start, end) = (sphere_starts[radius - 1], sphere_starts[radius]);
        let frontier = &elements[start..end];
        let expand = |x: &GroupElement| -> Vec<(Vec<u8>, GroupElement)> {
            g.generators()
                .iter()
                .map(|s| {
                    let y = g.compose(x, s);
                    (y.key(), y)
                })
                .collect()
        };
        let candidates: Vec<(Vec<u8>, GroupElement)> = if frontier.len() >= PAR_THRESHOLD {
            frontier.par_iter().flat_map_iter(expand).collect()
        } else {
            frontier.iter().flat_map(expand).collect()
        };
        let mut fresh = Vec::new();
        for (k, y) in candidates {
            if seen.insert(k) {
                fresh.push(y);
                if elements.len() + fresh.len() > budget {
                    return Err(GroupError::BudgetExceeded { completed_radius: radius - 1 });
                }
            }
        }
        if fresh.is_empty() {
            exhausted = true;
        }
        elements.extend(fresh);
        sphere_starts.push(elements.len());
    }
    let cumulative: Vec<u64> = sphere_starts[1..].iter().map(|&e| e as u64).collect();
    let spheres = cumulative.windows(2).map(|w| w[1] - w[0]).collect();
    let profile = BallProfile { radius: r, cumulative, spheres, exhausted };
    Ok(Ball { elements, sphere_starts, profile })
}

pub fn ball_profile(g: &GroupModel, r: usize, budget: usize) -> Result<BallProfile, GroupError> {
    Ok(enumerate_ball(g, r, budget)?.profile)
}

/// `|B_n ∩ H|` for the subgroup cut out by `member`.
pub fn subgroup_ball_count<F>(g: &GroupModel, n: usize, budget: usize, member: F) -> Result<u64, GroupError>
where
    F: Fn(&GroupElement) -> bool,
{
    let ball = enumerate_ball(g, n, budget)?;
    Ok(ball.within(n).iter().filter(|x| member(x)).count() as u64)
}

/// `|A X^{±1} \ A|`.
pub fn vertex_boundary_size(g: &GroupModel, a: &[GroupElement]) -> usize {
    let inside: HashSet<Vec<u8>> = a.iter().map(GroupElement::key).collect();
    let mut boundary = HashSet::new();
    for x in a {
        for s in g.generators() {
            let k = g.compose(x, s).key();
            if !inside.contains(&k) {
                boundary.insert(k);
            }
        }
    }
    boundary.len()
}
