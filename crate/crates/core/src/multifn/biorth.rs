//! `F(t) = conv{x_n : t ∈ π(n)}` in sparse ℓ2, with `x_n = 2e_n`, `f_n = e_n/2`.
//!
//! The countable base consists of the rational intervals `(x, y)`,
//! `0 ≤ x < y ≤ 1`, taken relative to [0,1]: an interval starting at 0
//! contains 0 and one ending at 1 contains 1. They are numbered by level
//! `q` (the Farey order in which both endpoints first appear) and then
//! lexicographically by `(x, y)`. Level `q` holds the pairs of `F_q` that
//! are not already pairs of `F_{q−1}`, so level `q` starts at index
//! `C(|F_{q−1}|, 2)`. Index 0 is the whole interval `[0,1]`.
//!
//! `π(n)` is the union of the base intervals at the 1-bits of `n`. Every
//! finite union arises this way, so π is onto; different bit-sets can give
//! the same union, so it is not one-to-one.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Multifunction;
use crate::error::{Error, Result};
use crate::partition::TaggedPartition;
use crate::real::{format_rational, Rational, Real};
use crate::sets::CompactSet;
use crate::space::{Functional, Space, Vector};

/// Materialized values use the indices `1 ≤ n < 2^BIORTH_TRUNCATION_BITS`.
pub const BIORTH_TRUNCATION_BITS: u32 = 6;

const FAREY_CACHE: i64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaseInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl BaseInterval {
    pub fn contains(&self, t: Rational) -> bool {
        base_interval_contains(self.lo, self.hi, t)
    }
}

impl std::fmt::Display for BaseInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let open = if self.lo.is_zero() { '[' } else { '(' };
        let close = if self.hi.is_one() { ']' } else { ')' };
        write!(
            f,
            "{open}{}, {}{close}",
            format_rational(self.lo),
            format_rational(self.hi)
        )
    }
}

pub fn base_interval_contains(lo: Rational, hi: Rational, t: Rational) -> bool {
    (lo < t && t < hi) || (lo.is_zero() && t.is_zero()) || (hi.is_one() && t.is_one())
}

fn build_farey(q: i64) -> Vec<Rational> {
    // Successive terms a/b, c/d of F_q.
    let (mut a, mut b, mut c, mut d) = (0i64, 1i64, 1i64, q);
    let mut out = vec![Rational::new(0, 1)];
    while c <= q {
        let k = (q + b) / d;
        let next = (c, d, k * c - a, k * d - b);
        out.push(Rational::new(c, d));
        (a, b, c, d) = next;
    }
    out
}

fn farey_cache() -> &'static Vec<Vec<Rational>> {
    static CACHE: OnceLock<Vec<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| {
        (0..=FAREY_CACHE)
            .map(|q| if q == 0 { Vec::new() } else { build_farey(q) })
            .collect()
    })
}

fn with_farey<R>(q: i64, f: impl FnOnce(&[Rational]) -> R) -> R {
    if q <= FAREY_CACHE {
        f(&farey_cache()[q as usize])
    } else {
        f(&build_farey(q))
    }
}

fn totient(mut n: i64) -> i64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// The level of base index `k` together with `|F_{q−1}|` and `|F_q|`.
fn level_of(k: u64) -> (i64, u64, u64) {
    let mut q = 1i64;
    let mut prev = 0u64;
    let mut len = 2u64;
    while pairs(len) <= k {
        q += 1;
        prev = len;
        len += totient(q) as u64;
    }
    (q, prev, len)
}

/// `|F_q|`.
fn farey_len(q: i64) -> u64 {
    if q <= 0 {
        return 0;
    }
    1 + (1..=q).map(|d| totient(d) as u64).sum::<u64>()
}

pub fn base_level(k: u64) -> i64 {
    level_of(k).0
}

/// Decodes base index `k`.
pub fn base_interval(k: u64) -> BaseInterval {
    let (q, prev, _) = level_of(k);
    let mut j = k - pairs(prev);
    with_farey(q, |fq| {
        let is_new: Vec<bool> = fq.iter().map(|r| *r.denom() == q).collect();
        let mut new_after: Vec<u64> = vec![0; fq.len() + 1];
        for i in (0..fq.len()).rev() {
            new_after[i] = new_after[i + 1] + u64::from(is_new[i]);
        }
        for i in 0..fq.len() {
            let count = if is_new[i] {
                (fq.len() - 1 - i) as u64
            } else {
                new_after[i + 1]
            };
            if j < count {
                let hi = if is_new[i] {
                    fq[i + 1 + j as usize]
                } else {
                    *fq[i + 1..]
                        .iter()
                        .zip(&is_new[i + 1..])
                        .filter(|(_, &n)| n)
                        .nth(j as usize)
                        .expect("counted")
                        .0
                };
                return BaseInterval { lo: fq[i], hi };
            }
            j -= count;
        }
        unreachable!("index inside its level")
    })
}

/// Index of the base interval `(lo, hi)`; both ends must lie in `F_q` with
/// at least one of denominator exactly `q`.
fn encode(q: i64, lo: Rational, hi: Rational) -> u64 {
    with_farey(q, |fq| {
        let is_new = |r: &Rational| *r.denom() == q;
        let total_new = fq.iter().filter(|r| is_new(r)).count() as u64;
        let mut idx = pairs(farey_len(q - 1));
        let mut new_seen = 0u64;
        for (i, u) in fq.iter().enumerate() {
            if is_new(u) {
                new_seen += 1;
            }
            if *u == lo {
                let between = fq[i + 1..].iter().take_while(|v| **v < hi);
                idx += if is_new(u) {
                    between.count() as u64
                } else {
                    between.filter(|v| is_new(v)).count() as u64
                };
                return idx;
            }
            idx += if is_new(u) {
                (fq.len() - 1 - i) as u64
            } else {
                total_new - new_seen
            };
        }
        unreachable!("endpoint in F_q")
    })
}

/// Elements of `F_q` in `[lo, hi]`, sorted.
fn farey_range(q: i64, lo: Rational, hi: Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    for d in 1..=q {
        let dr = Rational::from_integer(d);
        let a0 = (lo * dr).ceil().to_integer();
        let a1 = (hi * dr).floor().to_integer();
        for a in a0..=a1 {
            if a.gcd(&d) == 1 {
                out.push(Rational::new(a, d));
            }
        }
    }
    out.sort();
    out
}

/// Lowest-index base interval containing `t` and no point of `avoid`.
fn lowest_separating(t: Rational, avoid: &[Rational]) -> Result<(u64, BaseInterval)> {
    if avoid.contains(&t) {
        return Err(Error::Precondition(format!(
            "{} lies in the set it must be separated from",
            format_rational(t)
        )));
    }
    let zero = Rational::zero();
    let one = Rational::one();
    let left = avoid.iter().filter(|&&s| s < t).max().copied();
    let right = avoid.iter().filter(|&&s| s > t).min().copied();
    let zero_blocked = avoid.contains(&zero);
    let one_blocked = avoid.contains(&one);
    for q in 1i64.. {
        let xs: Vec<Rational> = if t.is_zero() {
            vec![zero]
        } else {
            farey_range(q, left.unwrap_or(zero), t)
                .into_iter()
                .filter(|&x| x < t && !(x.is_zero() && zero_blocked))
                .collect()
        };
        let ys: Vec<Rational> = if t.is_one() {
            vec![one]
        } else {
            farey_range(q, t, right.unwrap_or(one))
                .into_iter()
                .filter(|&y| y > t && !(y.is_one() && one_blocked))
                .collect()
        };
        if xs.is_empty() || ys.is_empty() {
            continue;
        }
        for &x in &xs {
            let y = if *x.denom() == q {
                Some(ys[0])
            } else {
                ys.iter().copied().find(|y| *y.denom() == q)
            };
            if let Some(y) = y {
                let iv = BaseInterval { lo: x, hi: y };
                return Ok((encode(q, x, y), iv));
            }
        }
    }
    unreachable!("every point is separated at some finite level")
}

/// Whether `t ∈ π(n)`.
pub fn in_pi(n: &BigUint, t: Rational) -> bool {
    set_bits(n).any(|k| base_interval(k).contains(t))
}

fn set_bits(n: &BigUint) -> impl Iterator<Item = u64> + '_ {
    n.iter_u64_digits().enumerate().flat_map(|(i, word)| {
        let mut w = word;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let tz = w.trailing_zeros() as u64;
            w &= w - 1;
            Some(64 * i as u64 + tz)
        })
    })
}

/// A finite union of base intervals covering `points` and missing `avoid`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatingUnion {
    /// `(base index, interval)`, one per distinct interval, by index.
    pub intervals: Vec<(u64, BaseInterval)>,
    /// `π⁻¹` of the union: the bit-set of the chosen base indices.
    pub index: BigUint,
}

/// For each point pick the lowest-index base interval containing it and
/// avoiding `avoid`, then take the union.
pub fn separating_union(points: &[Rational], avoid: &[Rational]) -> Result<SeparatingUnion> {
    let mut chosen: Vec<(u64, BaseInterval)> = Vec::new();
    for &t in points {
        let (k, iv) = lowest_separating(t, avoid)?;
        if !chosen.iter().any(|(j, _)| *j == k) {
            chosen.push((k, iv));
        }
    }
    chosen.sort_by_key(|(k, _)| *k);
    let mut index = BigUint::zero();
    for (k, _) in &chosen {
        index.set_bit(*k, true);
    }
    Ok(SeparatingUnion {
        intervals: chosen,
        index,
    })
}

#[derive(Clone, Debug)]
pub struct Biorthogonal {
    space: Space,
}

impl Default for Biorthogonal {
    fn default() -> Self {
        Biorthogonal {
            space: Space::sparse_hilbert(),
        }
    }
}

impl Biorthogonal {
    pub fn new() -> Self {
        Self::default()
    }

    /// `x_n = 2e_n`.
    pub fn x(n: BigUint) -> Vector {
        Vector::sparse_unit(n, 2.0)
    }

    /// `f_n = e_n / 2`.
    pub fn f(n: BigUint) -> Functional {
        Functional(Vector::sparse_unit(n, 0.5))
    }
}

impl Multifunction for Biorthogonal {
    fn name(&self) -> String {
        "biorth".into()
    }

    fn space(&self) -> &Space {
        &self.space
    }

    /// The truncation `conv{x_n : t ∈ π(n), n < 2^6}`.
    fn eval(&self, t: &Real) -> Result<CompactSet> {
        let t = t.require_exact()?;
        let vertices: Vec<Vector> = (1u64..1 << BIORTH_TRUNCATION_BITS)
            .map(BigUint::from)
            .filter(|n| in_pi(n, t))
            .map(Biorthogonal::x)
            .collect();
        CompactSet::polytope(vertices)
    }

    fn bound(&self) -> f64 {
        2.0
    }

    fn convex_valued(&self) -> bool {
        true
    }

    fn materializable(&self) -> bool {
        false
    }

    /// `max(0, max{2 g_n : n ∈ supp g, t ∈ π(n)})`: infinitely many `x_n`
    /// with `t ∈ π(n)` lie outside any finite support, which contributes 0.
    fn support_at(&self, t: &Real, g: &Functional) -> Result<f64> {
        let t = t.require_exact()?;
        match g.coefficients() {
            Vector::Sparse(m) => Ok(m
                .iter()
                .filter(|(n, &c)| c > 0.0 && in_pi(n, t))
                .map(|(_, &c)| 2.0 * c)
                .fold(0.0, f64::max)),
            Vector::Dense(_) => Err(Error::IncompatibleSpace(
                "biorth needs a sparse functional".into(),
            )),
        }
    }

    fn witness_functionals(
        &self,
        coarse: &TaggedPartition,
        fine: &TaggedPartition,
    ) -> Result<Vec<Functional>> {
        let avoid = coarse
            .tags()
            .iter()
            .map(Real::require_exact)
            .collect::<Result<Vec<_>>>()?;
        let points: Vec<Rational> = fine
            .tags()
            .iter()
            .map(Real::require_exact)
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|t| !avoid.contains(t))
            .collect();
        if points.is_empty() {
            return Ok(Vec::new());
        }
        let u = separating_union(&points, &avoid)?;
        Ok(vec![Biorthogonal::f(u.index)])
    }
}
