//! Reals that remember whether they are exact rationals.
//!
//! Several multifunctions in this crate are defined by arithmetic conditions
//! on the tag (is `t` rational? is its denominator twice a prime?). A bare
//! `f64` cannot decide those, so tags and scale factors are carried as a
//! [`Real`]: an `f64` value plus, when known, the exact rational it stands for.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedMul, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Denominator cap used when a float is matched back to a rational.
pub const RECONSTRUCTION_DENOMINATOR_CAP: i64 = 1_000_000;

/// An `f64` with an optional exact rational identity.
///
/// A `Real` without an exact part is *generic*: special-set membership tests
/// treat it as lying outside every countable special set (the irrational
/// branch of the rational indicator, the "otherwise" branch of the L1 example).
#[derive(Clone, Copy, Debug)]
pub struct Real {
    value: f64,
    exact: Option<Rational>,
}

impl Real {
    pub fn exact(r: Rational) -> Self {
        Real {
            value: rational_to_f64(r),
            exact: Some(r),
        }
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Real::exact(Rational::new(numer, denom))
    }

    pub fn integer(n: i64) -> Self {
        Real::exact(Rational::from_integer(n))
    }

    /// A float with no rational identity.
    pub fn generic(value: f64) -> Self {
        Real { value, exact: None }
    }

    /// A float whose rational identity is recovered when some `p/q` with
    /// `q <= 10^6` rounds to exactly this float; generic otherwise.
    pub fn from_f64(value: f64) -> Self {
        Real {
            value,
            exact: reconstruct_rational(value, RECONSTRUCTION_DENOMINATOR_CAP),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.exact
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn require_exact(&self) -> Result<Rational> {
        self.exact
            .ok_or_else(|| Error::InexactTag(self.to_string()))
    }

    pub fn is_zero(&self) -> bool {
        match self.exact {
            Some(r) => r.is_zero(),
            None => self.value == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self.exact {
            Some(r) => r.is_negative(),
            None => self.value < 0.0,
        }
    }

    pub fn mul(&self, other: &Real) -> Real {
        match (self.exact, other.exact) {
            (Some(a), Some(b)) => match a.checked_mul(&b) {
                Some(r) => Real::exact(r),
                None => Real::generic(self.value * other.value),
            },
            _ => Real::generic(self.value * other.value),
        }
    }

    pub fn one_minus(&self) -> Real {
        match self.exact {
            Some(r) => Real::exact(Rational::one() - r),
            None => Real::generic(1.0 - self.value),
        }
    }

    /// Exact comparison when both sides are exact, float comparison otherwise.
    pub fn cmp_value(&self, other: &Real) -> Ordering {
        match (self.exact, other.exact) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => self.value.total_cmp(&other.value),
        }
    }

    /// Identity: exact tags compare as rationals, generic ones bitwise.
    pub fn same_as(&self, other: &Real) -> bool {
        match (self.exact, other.exact) {
            (Some(a), Some(b)) => a == b,
            (None, None) => self.value.to_bits() == other.value.to_bits(),
            _ => false,
        }
    }
}

impl From<Rational> for Real {
    fn from(r: Rational) -> Self {
        Real::exact(r)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::from_f64(x)
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(r) => write!(f, "{}", format_rational(r)),
            None => write!(f, "float:{:?}", self.value),
        }
    }
}

impl FromStr for Real {
    type Err = Error;

    /// Accepts `p/q`, an integer, a finite decimal (read exactly), or
    /// `float:<x>` for a generic float.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("float:") {
            let x: f64 = rest
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad float `{rest}`")))?;
            return Ok(Real::generic(x));
        }
        parse_rational(s).map(Real::exact)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn rational_to_f64(r: Rational) -> f64 {
    // i64 -> f64 is exact below 2^53, which covers every denominator we build.
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn format_rational(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, `p`, or a finite decimal such as `0.125` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational number: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty()
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
            || frac_part.len() > 17
        {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let whole: i64 = if int_digits.is_empty() {
            0
        } else {
            int_digits.parse().map_err(|_| bad())?
        };
        let denom = 10i64.checked_pow(frac_part.len() as u32).ok_or_else(bad)?;
        let frac: i64 = frac_part.parse().map_err(|_| bad())?;
        let numer = whole
            .checked_mul(denom)
            .and_then(|w| w.checked_add(frac))
            .ok_or_else(bad)?;
        let r = Rational::new(numer, denom);
        return Ok(if negative { -r } else { r });
    }
    let n: i64 = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Finds `p/q` with `q <= cap` whose nearest `f64` is exactly `x`.
///
/// Walks the continued-fraction convergents of `x`; the first convergent
/// that rounds back to `x` is the simplest rational doing so.
pub fn reconstruct_rational(x: f64, cap: i64) -> Option<Rational> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    let (mut h_prev, mut h) = (0i128, 1i128);
    let (mut k_prev, mut k) = (1i128, 0i128);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        let a_int = a as i128;
        let h_next = a_int.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a_int.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > cap as i128 {
            return None;
        }
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        if k > 0 && (h as f64) / (k as f64) == x {
            let (n, d) = (i64::try_from(h).ok()?, i64::try_from(k).ok()?);
            return Some(Rational::new(n, d));
        }
        let frac = rest - a;
        if frac == 0.0 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

/// Deterministic primality test for the small integers used as partition sizes.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_even() {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    (2u64..).filter(|&n| is_prime(n)).take(count).collect()
}
