//! Weighted sums of characteristic-function sets in a bin-discretized L1[0,1].
//!
//! `E[a,b]` is the set of indicator functions of measurable subsets of
//! `[a,b]`. On a grid of `m` equal bins, with every endpoint on the grid,
//! a sum `Σ w_k E[I_k]` over pairwise-disjoint intervals is the product set
//! `Π_j {0, a_j}`: bin `j` carries either nothing or the weight `a_j` of the
//! term covering it. Every metric quantity then separates across bins, which
//! is what makes distances, norms and support values exact closed forms
//! even though the set has `2^(bins covered)` elements.

use std::fmt;

use num_traits::{CheckedMul, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::real::{format_rational, rational_to_f64, Rational};

/// One term `weight · E[lo/m, hi/m]`, stored by bin indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ETerm {
    pub lo: u64,
    pub hi: u64,
    pub weight: Rational,
}

#[derive(Clone, Debug)]
pub struct ESum {
    bins: u64,
    terms: Vec<ETerm>,
}

fn to_bin(x: Rational, bins: u64) -> Result<u64> {
    if x < Rational::zero() || x > Rational::one() {
        return Err(Error::InvalidArgument(format!(
            "interval endpoint {} outside [0,1]",
            format_rational(x)
        )));
    }
    let scaled = x * Rational::from_integer(bins as i64);
    if !scaled.is_integer() {
        return Err(Error::NotBinAligned {
            endpoint: format_rational(x),
            bins,
        });
    }
    Ok(*scaled.numer() as u64)
}

impl ESum {
    /// The set `{0}`.
    pub fn zero(bins: u64) -> Self {
        ESum {
            bins,
            terms: Vec::new(),
        }
    }

    /// A single term `weight · E[lo, hi]`.
    pub fn single(bins: u64, weight: Rational, lo: Rational, hi: Rational) -> Result<Self> {
        ESum::new(bins, vec![(weight, lo, hi)])
    }

    /// Builds a sum from `(weight, lo, hi)` triples with rational endpoints.
    pub fn new(bins: u64, terms: Vec<(Rational, Rational, Rational)>) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidArgument(
                "L1 grid needs at least one bin".into(),
            ));
        }
        let mut out = Vec::with_capacity(terms.len());
        for (weight, lo, hi) in terms {
            if weight <= Rational::zero() {
                return Err(Error::InvalidArgument(format!(
                    "E-set weight must be positive, got {}",
                    format_rational(weight)
                )));
            }
            let (l, h) = (to_bin(lo, bins)?, to_bin(hi, bins)?);
            if l >= h {
                return Err(Error::InvalidArgument(format!(
                    "empty interval [{}, {}]",
                    format_rational(lo),
                    format_rational(hi)
                )));
            }
            out.push(ETerm {
                lo: l,
                hi: h,
                weight,
            });
        }
        ESum::from_terms(bins, out)
    }

    pub(crate) fn from_terms(bins: u64, terms: Vec<ETerm>) -> Result<Self> {
        let mut sorted = terms.clone();
        sorted.sort();
        for pair in sorted.windows(2) {
            if pair[1].lo < pair[0].hi {
                return Err(Error::IntervalOverlap(
                    describe_interval(&pair[0], bins),
                    describe_interval(&pair[1], bins),
                ));
            }
        }
        Ok(ESum { bins, terms })
    }

    pub fn bins(&self) -> u64 {
        self.bins
    }

    /// Terms in construction order (not normalized).
    pub fn terms(&self) -> &[ETerm] {
        &self.terms
    }

    pub fn interval(&self, term: &ETerm) -> (Rational, Rational) {
        let m = self.bins as i64;
        (
            Rational::new(term.lo as i64, m),
            Rational::new(term.hi as i64, m),
        )
    }

    /// Minkowski sum: term lists concatenate; intervals must stay disjoint.
    pub fn minkowski(&self, other: &ESum) -> Result<ESum> {
        if self.bins != other.bins {
            return Err(Error::IncompatibleSpace(format!(
                "E-sums on grids of {} and {} bins",
                self.bins, other.bins
            )));
        }
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        ESum::from_terms(self.bins, terms)
    }

    /// Scales every weight; `λ = 0` gives `{0}`.
    pub fn scale(&self, lambda: Rational) -> Result<ESum> {
        if lambda.is_negative() {
            return Err(Error::InvalidArgument(
                "E-sums only scale by non-negative factors".into(),
            ));
        }
        if lambda.is_zero() {
            return Ok(ESum::zero(self.bins));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                t.weight
                    .checked_mul(&lambda)
                    .map(|weight| ETerm { weight, ..*t })
                    .ok_or_else(|| Error::InvalidArgument("rational overflow while scaling".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ESum {
            bins: self.bins,
            terms,
        })
    }

    /// Canonical form: sorted, with adjacent equal-weight intervals merged.
    pub fn normalized(&self) -> ESum {
        let mut sorted = self.terms.clone();
        sorted.sort();
        let mut out: Vec<ETerm> = Vec::with_capacity(sorted.len());
        for t in sorted {
            match out.last_mut() {
                Some(last) if last.hi == t.lo && last.weight == t.weight => last.hi = t.hi,
                _ => out.push(t),
            }
        }
        ESum {
            bins: self.bins,
            terms: out,
        }
    }

    /// Equality as sets: identical normalized forms on the same grid.
    pub fn set_eq(&self, other: &ESum) -> bool {
        self.bins == other.bins && self.normalized().terms == other.normalized().terms
    }

    /// Piecewise-constant amplitude `a_j` as `(start_bin, end_bin, amplitude)`
    /// runs covering `[0, m)`, zero runs included.
    fn runs(&self) -> Vec<(u64, u64, Rational)> {
        let norm = self.normalized();
        let mut runs = Vec::new();
        let mut cursor = 0;
        for t in &norm.terms {
            if t.lo > cursor {
                runs.push((cursor, t.lo, Rational::zero()));
            }
            runs.push((t.lo, t.hi, t.weight));
            cursor = t.hi;
        }
        if cursor < self.bins {
            runs.push((cursor, self.bins, Rational::zero()));
        }
        runs
    }

    /// Per-bin amplitudes `a_j`.
    pub fn amplitudes(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.bins as usize];
        for t in &self.terms {
            for a in &mut out[t.lo as usize..t.hi as usize] {
                *a = t.weight;
            }
        }
        out
    }

    /// `sup ‖v‖` over the set: `Σ w_k |I_k|`.
    pub fn norm_exact(&self) -> Rational {
        let m = self.bins as i64;
        self.terms
            .iter()
            .map(|t| t.weight * Rational::new((t.hi - t.lo) as i64, m))
            .sum()
    }

    /// `sup_{v ∈ E} ⟨f, v⟩` for a per-bin functional: the best subset takes
    /// exactly the bins where `f` is positive.
    pub fn support(&self, f: &[f64]) -> Result<f64> {
        if f.len() as u64 != self.bins {
            return Err(Error::DimensionMismatch {
                expected: self.bins as usize,
                found: f.len(),
            });
        }
        let m = self.bins as f64;
        Ok(self
            .terms
            .iter()
            .map(|t| {
                let pos: f64 = f[t.lo as usize..t.hi as usize]
                    .iter()
                    .map(|x| x.max(0.0))
                    .sum();
                rational_to_f64(t.weight) * pos / m
            })
            .sum())
    }

    /// Distance from a per-bin function `v` to the set, exactly:
    /// `Σ_j (1/m) min_{y ∈ {0, a_j}} |v_j − y|`.
    pub fn distance_from(&self, v: &[Rational]) -> Result<Rational> {
        if v.len() as u64 != self.bins {
            return Err(Error::DimensionMismatch {
                expected: self.bins as usize,
                found: v.len(),
            });
        }
        let amp = self.amplitudes();
        let total: Rational = v
            .iter()
            .zip(&amp)
            .map(|(vj, aj)| {
                let to_zero = vj.abs();
                if aj.is_zero() {
                    to_zero
                } else {
                    to_zero.min((vj - aj).abs())
                }
            })
            .sum();
        Ok(total / Rational::from_integer(self.bins as i64))
    }

    /// Exact Hausdorff distance between two E-sums on the same grid.
    ///
    /// Both sets are products of two-point sets `{0, a_j}` and `{0, b_j}`
    /// under a separable norm, so each directed distance is the bin-sum of
    /// `min(|a_j|, |a_j − b_j|)` (resp. with `a`, `b` swapped).
    pub fn hausdorff(&self, other: &ESum) -> Result<Rational> {
        if self.bins != other.bins {
            return Err(Error::IncompatibleSpace(format!(
                "E-sums on grids of {} and {} bins",
                self.bins, other.bins
            )));
        }
        let (ra, rb) = (self.runs(), other.runs());
        let mut cuts: Vec<u64> = ra.iter().chain(&rb).flat_map(|r| [r.0, r.1]).collect();
        cuts.sort_unstable();
        cuts.dedup();
        let amp_at = |runs: &[(u64, u64, Rational)], bin: u64| {
            runs.iter()
                .find(|r| r.0 <= bin && bin < r.1)
                .map(|r| r.2)
                .unwrap_or_else(Rational::zero)
        };
        let (mut ab, mut ba) = (Rational::zero(), Rational::zero());
        for w in cuts.windows(2) {
            let len = Rational::from_integer((w[1] - w[0]) as i64);
            let (a, b) = (amp_at(&ra, w[0]), amp_at(&rb, w[0]));
            let gap = (a - b).abs();
            ab += len * a.abs().min(gap);
            ba += len * b.abs().min(gap);
        }
        let m = Rational::from_integer(self.bins as i64);
        Ok(ab.max(ba) / m)
    }
}

impl PartialEq for ESum {
    fn eq(&self, other: &Self) -> bool {
        self.set_eq(other)
    }
}

fn describe_interval(t: &ETerm, bins: u64) -> String {
    let m = bins as i64;
    format!(
        "{}, {}",
        format_rational(Rational::new(t.lo as i64, m)),
        format_rational(Rational::new(t.hi as i64, m))
    )
}

impl fmt::Display for ESum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "{{0}}");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                format!(
                    "{}·E[{}]",
                    format_rational(t.weight),
                    describe_interval(t, self.bins)
                )
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
