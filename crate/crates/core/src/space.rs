//! The ambient normed space: vectors, ℓp norms, dual functionals.
//!
//! Three models are supported:
//!
//! * `Dense(d)`: ℝ^d with an ℓp norm, `p ∈ [1, ∞]` stored exactly.
//! * `SparseInfinite`: finitely supported sequences indexed by arbitrary
//!   non-negative integers, with the ℓ2 norm. Indices are big integers so a
//!   coordinate can be addressed by a bit-set code of any size.
//! * `L1Grid(m)`: L1[0,1] restricted to functions constant on `m` equal bins,
//!   so `‖v‖ = Σ|v_j|/m` and `⟨f, v⟩ = Σ f_j v_j / m`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{format_rational, rational_to_f64, Rational};

/// The exponent `p` of an ℓp norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    Finite(Rational),
    Infinity,
}

impl Exponent {
    pub fn new(p: Rational) -> Result<Self> {
        if p < Rational::one() {
            return Err(Error::InvalidArgument(format!(
                "norm exponent must be >= 1, got {}",
                format_rational(p)
            )));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn one() -> Self {
        Exponent::Finite(Rational::one())
    }

    pub fn two() -> Self {
        Exponent::Finite(Rational::from_integer(2))
    }

    /// `q` with `1/p + 1/q = 1`, computed exactly.
    pub fn conjugate(&self) -> Exponent {
        match *self {
            Exponent::Infinity => Exponent::one(),
            Exponent::Finite(p) if p == Rational::one() => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - Rational::one())),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Exponent::Infinity => f64::INFINITY,
            Exponent::Finite(p) => rational_to_f64(p),
        }
    }

    pub fn is_two(&self) -> bool {
        *self == Exponent::two()
    }

    /// ℓp norm of a coefficient slice.
    pub fn norm_of(&self, coeffs: impl Iterator<Item = f64>) -> f64 {
        match *self {
            Exponent::Infinity => coeffs.fold(0.0, |m, x| m.max(x.abs())),
            Exponent::Finite(p) if p == Rational::one() => coeffs.map(f64::abs).sum(),
            Exponent::Finite(p) if p == Rational::from_integer(2) => {
                coeffs.map(|x| x * x).sum::<f64>().sqrt()
            }
            Exponent::Finite(p) => {
                let p = rational_to_f64(p);
                coeffs.map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
            }
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinity => write!(f, "inf"),
            Exponent::Finite(p) => write!(f, "{}", format_rational(*p)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Dense(usize),
    SparseInfinite,
    L1Grid(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Space {
    mode: Mode,
    exponent: Exponent,
}

impl Space {
    pub fn dense(dimension: usize, exponent: Exponent) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        if let Exponent::Finite(p) = exponent {
            Exponent::new(p)?;
        }
        Ok(Space {
            mode: Mode::Dense(dimension),
            exponent,
        })
    }

    /// ℝ^d with the Euclidean norm.
    pub fn euclidean(dimension: usize) -> Self {
        Space::dense(dimension.max(1), Exponent::two()).expect("valid euclidean space")
    }

    /// The sparse ℓ2 sequence space.
    pub fn sparse_hilbert() -> Self {
        Space {
            mode: Mode::SparseInfinite,
            exponent: Exponent::two(),
        }
    }

    /// Sparse mode with an explicit exponent; only `p = 2` is accepted.
    pub fn sparse(exponent: Exponent) -> Result<Self> {
        if !exponent.is_two() {
            return Err(Error::InvalidArgument(format!(
                "sparse-infinite mode supports only p = 2, got p = {exponent}"
            )));
        }
        Ok(Space::sparse_hilbert())
    }

    /// Bin-discretized L1[0,1] with `bins` equal bins.
    pub fn l1_grid(bins: u64) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidArgument(
                "L1 grid needs at least one bin".into(),
            ));
        }
        Ok(Space {
            mode: Mode::L1Grid(bins),
            exponent: Exponent::one(),
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    /// Number of dense coordinates, `None` in sparse mode.
    pub fn dimension(&self) -> Option<usize> {
        match self.mode {
            Mode::Dense(d) => Some(d),
            Mode::L1Grid(m) => Some(m as usize),
            Mode::SparseInfinite => None,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.mode, Mode::Dense(_)) && self.exponent.is_two()
    }

    pub fn zero(&self) -> Vector {
        match self.mode {
            Mode::SparseInfinite => Vector::Sparse(BTreeMap::new()),
            _ => Vector::Dense(vec![0.0; self.dimension().unwrap_or(0)]),
        }
    }

    /// The `i`-th unit vector (0-based).
    pub fn basis(&self, i: usize) -> Result<Vector> {
        match self.mode {
            Mode::SparseInfinite => Ok(Vector::sparse_unit(BigUint::from(i), 1.0)),
            _ => {
                let d = self.dimension().unwrap_or(0);
                if i >= d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: i + 1,
                    });
                }
                let mut v = vec![0.0; d];
                v[i] = 1.0;
                Ok(Vector::Dense(v))
            }
        }
    }

    pub fn check(&self, v: &Vector) -> Result<()> {
        match (&self.mode, v) {
            (Mode::SparseInfinite, Vector::Sparse(_)) => Ok(()),
            (Mode::SparseInfinite, Vector::Dense(_)) => Err(Error::IncompatibleSpace(
                "dense vector in sparse-infinite space".into(),
            )),
            (_, Vector::Sparse(_)) => Err(Error::IncompatibleSpace(
                "sparse vector in a finite-dimensional space".into(),
            )),
            (_, Vector::Dense(c)) => {
                let d = self.dimension().unwrap_or(0);
                if c.len() == d {
                    Ok(())
                } else {
                    Err(Error::DimensionMismatch {
                        expected: d,
                        found: c.len(),
                    })
                }
            }
        }
    }

    pub fn norm(&self, v: &Vector) -> Result<f64> {
        self.check(v)?;
        Ok(self.norm_unchecked(v))
    }

    pub(crate) fn norm_unchecked(&self, v: &Vector) -> f64 {
        match (&self.mode, v) {
            (Mode::L1Grid(m), Vector::Dense(c)) => {
                c.iter().map(|x| x.abs()).sum::<f64>() / *m as f64
            }
            (_, Vector::Dense(c)) => self.exponent.norm_of(c.iter().copied()),
            (_, Vector::Sparse(c)) => self.exponent.norm_of(c.values().copied()),
        }
    }

    /// Distance `‖a − b‖` between two compatible vectors.
    pub fn distance(&self, a: &Vector, b: &Vector) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.distance_unchecked(a, b))
    }

    pub(crate) fn distance_unchecked(&self, a: &Vector, b: &Vector) -> f64 {
        match (a, b) {
            (Vector::Dense(x), Vector::Dense(y)) => self.dense_distance(x, y),
            _ => self.norm_unchecked(&a.sub(b)),
        }
    }

    pub(crate) fn dense_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let diffs = x.iter().zip(y).map(|(a, b)| a - b);
        match self.mode {
            Mode::L1Grid(m) => diffs.map(f64::abs).sum::<f64>() / m as f64,
            _ => self.exponent.norm_of(diffs),
        }
    }

    /// Norm of a functional in the dual space.
    pub fn dual_norm(&self, f: &Functional) -> Result<f64> {
        self.check(&f.0)?;
        Ok(match (&self.mode, &f.0) {
            (Mode::L1Grid(_), Vector::Dense(c)) => c.iter().fold(0.0, |m, x| m.max(x.abs())),
            (_, Vector::Dense(c)) => self.exponent.conjugate().norm_of(c.iter().copied()),
            (_, Vector::Sparse(c)) => self.exponent.conjugate().norm_of(c.values().copied()),
        })
    }

    /// The duality pairing `⟨f, v⟩`.
    pub fn pair(&self, f: &Functional, v: &Vector) -> Result<f64> {
        self.check(&f.0)?;
        self.check(v)?;
        Ok(self.pair_unchecked(f, v))
    }

    pub(crate) fn pair_unchecked(&self, f: &Functional, v: &Vector) -> f64 {
        let raw = f.0.dot(v);
        match self.mode {
            Mode::L1Grid(m) => raw / m as f64,
            _ => raw,
        }
    }

    /// `count` unit-dual-norm functionals: the `2d` signed coordinate
    /// functionals first, then seeded Gaussian draws normalized in the dual norm.
    pub fn sample_directions(&self, count: usize, seed: u64) -> Result<Vec<Functional>> {
        let d = match self.mode {
            Mode::SparseInfinite => {
                return Err(Error::Unsupported(
                    "direction sampling needs a finite-dimensional space".into(),
                ))
            }
            _ => self.dimension().unwrap_or(0),
        };
        if count < 2 * d {
            return Err(Error::InvalidArgument(format!(
                "need at least {} directions to include the signed coordinate functionals",
                2 * d
            )));
        }
        let mut out = Vec::with_capacity(count);
        for i in 0..d {
            for sign in [1.0, -1.0] {
                let mut c = vec![0.0; d];
                c[i] = sign;
                out.push(Functional(Vector::Dense(c)));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while out.len() < count {
            let c: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let f = Functional(Vector::Dense(c));
            let n = self.dual_norm(&f)?;
            if n > 1e-8 {
                out.push(f.scaled(1.0 / n));
            }
        }
        Ok(out)
    }
}

/// `count` equally spaced unit directions in the Euclidean plane, starting at `e₁`.
pub fn circle_directions(count: usize) -> Vec<Functional> {
    (0..count)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / count as f64;
            Functional(Vector::Dense(vec![theta.cos(), theta.sin()]))
        })
        .collect()
}

/// A point of the ambient space.
#[derive(Clone, Debug, PartialEq)]
pub enum Vector {
    Dense(Vec<f64>),
    /// No explicit zeros are stored.
    Sparse(BTreeMap<BigUint, f64>),
}

impl Vector {
    pub fn dense(coeffs: impl Into<Vec<f64>>) -> Self {
        Vector::Dense(coeffs.into())
    }

    pub fn sparse(entries: impl IntoIterator<Item = (BigUint, f64)>) -> Self {
        let mut map = BTreeMap::new();
        for (k, v) in entries {
            *map.entry(k).or_insert(0.0) += v;
        }
        map.retain(|_, v| *v != 0.0);
        Vector::Sparse(map)
    }

    pub fn sparse_unit(index: BigUint, value: f64) -> Self {
        Vector::sparse([(index, value)])
    }

    pub fn as_dense(&self) -> Option<&[f64]> {
        match self {
            Vector::Dense(c) => Some(c),
            Vector::Sparse(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Vector::Dense(c) => c.iter().all(|x| *x == 0.0),
            Vector::Sparse(c) => c.is_empty(),
        }
    }

    /// Coordinate `i`, zero when absent.
    pub fn coord(&self, i: &BigUint) -> f64 {
        match self {
            Vector::Dense(c) => i.to_usize().and_then(|i| c.get(i).copied()).unwrap_or(0.0),
            Vector::Sparse(c) => c.get(i).copied().unwrap_or(0.0),
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.combine(other, -1.0)
    }

    /// `self + s·other`
    pub fn combine(&self, other: &Vector, s: f64) -> Vector {
        match (self, other) {
            (Vector::Dense(a), Vector::Dense(b)) => {
                let n = a.len().max(b.len());
                Vector::Dense(
                    (0..n)
                        .map(|i| {
                            a.get(i).copied().unwrap_or(0.0) + s * b.get(i).copied().unwrap_or(0.0)
                        })
                        .collect(),
                )
            }
            _ => {
                let mut map = self.to_sparse_map();
                for (k, v) in other.to_sparse_map() {
                    *map.entry(k).or_insert(0.0) += s * v;
                }
                map.retain(|_, v| *v != 0.0);
                Vector::Sparse(map)
            }
        }
    }

    pub fn scaled(&self, s: f64) -> Vector {
        match self {
            Vector::Dense(c) => Vector::Dense(c.iter().map(|x| x * s).collect()),
            Vector::Sparse(c) => {
                let mut map: BTreeMap<_, _> = c.iter().map(|(k, v)| (k.clone(), v * s)).collect();
                map.retain(|_, v| *v != 0.0);
                Vector::Sparse(map)
            }
        }
    }

    /// Raw coordinate dot product `Σ a_j b_j`.
    pub fn dot(&self, other: &Vector) -> f64 {
        match (self, other) {
            (Vector::Dense(a), Vector::Dense(b)) => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            (Vector::Sparse(a), Vector::Sparse(b)) => {
                let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                small
                    .iter()
                    .filter_map(|(k, v)| large.get(k).map(|w| v * w))
                    .sum()
            }
            (Vector::Dense(d), Vector::Sparse(s)) | (Vector::Sparse(s), Vector::Dense(d)) => s
                .iter()
                .filter_map(|(k, v)| k.to_usize().and_then(|i| d.get(i)).map(|w| v * w))
                .sum(),
        }
    }

    fn to_sparse_map(&self) -> BTreeMap<BigUint, f64> {
        match self {
            Vector::Sparse(c) => c.clone(),
            Vector::Dense(c) => c
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (BigUint::from(i), *v))
                .collect(),
        }
    }

    /// Re-expresses a dense vector in sparse form (same coordinates).
    pub fn to_sparse(&self) -> Vector {
        Vector::Sparse(self.to_sparse_map())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum VectorRepr {
    Dense(Vec<f64>),
    Sparse(BTreeMap<String, f64>),
}

impl Serialize for Vector {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Vector::Dense(c) => VectorRepr::Dense(c.clone()).serialize(serializer),
            Vector::Sparse(c) => {
                // Decimal keys sort lexicographically in a BTreeMap<String, _>;
                // serialize in numeric order instead so output follows the index.
                use serde::ser::SerializeMap;
                let mut map = serializer.serialize_map(Some(c.len()))?;
                for (k, v) in c {
                    map.serialize_entry(&k.to_string(), v)?;
                }
                map.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        match VectorRepr::deserialize(deserializer)? {
            VectorRepr::Dense(c) => Ok(Vector::Dense(c)),
            VectorRepr::Sparse(m) => {
                let mut entries = Vec::with_capacity(m.len());
                for (k, v) in m {
                    let idx: BigUint = k
                        .parse()
                        .map_err(|_| serde::de::Error::custom(format!("bad sparse index `{k}`")))?;
                    entries.push((idx, v));
                }
                Ok(Vector::sparse(entries))
            }
        }
    }
}

/// A continuous linear functional, stored by its coefficients in the dual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Functional(pub Vector);

impl Functional {
    pub fn dense(coeffs: impl Into<Vec<f64>>) -> Self {
        Functional(Vector::dense(coeffs))
    }

    pub fn coefficients(&self) -> &Vector {
        &self.0
    }

    pub fn scaled(&self, s: f64) -> Functional {
        Functional(self.0.scaled(s))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// Parses `l2:3`, `l1:2`, `linf:4`, `l3/2:2`, `sparse`, or `grid:<bins>`.
impl std::str::FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidArgument(format!(
                "bad space `{s}` (try l2:2, l1:3, linf:2, grid:64, sparse)"
            ))
        };
        let s = s.trim();
        if s == "sparse" {
            return Ok(Space::sparse_hilbert());
        }
        let (norm, dim) = s.split_once(':').ok_or_else(bad)?;
        if norm == "grid" {
            return Space::l1_grid(dim.parse().map_err(|_| bad())?);
        }
        let p = norm.strip_prefix('l').ok_or_else(bad)?;
        let exponent = if p == "inf" {
            Exponent::Infinity
        } else {
            Exponent::new(crate::real::parse_rational(p)?)?
        };
        Space::dense(dim.parse().map_err(|_| bad())?, exponent)
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            Mode::Dense(d) => write!(f, "l{}:{}", self.exponent, d),
            Mode::SparseInfinite => write!(f, "sparse"),
            Mode::L1Grid(m) => write!(f, "grid:{m}"),
        }
    }
}

impl Serialize for Space {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Space {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
