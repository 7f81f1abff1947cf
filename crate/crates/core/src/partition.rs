//! Tagged partitions of [0,1].
//!
//! Breakpoints are exact rationals. Tags are [`Real`]s: exact when a
//! generator produces them from rational arithmetic, generic floats when
//! drawn at random.

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{
    first_primes, format_rational, is_prime, parse_rational, rational_to_f64, Rational, Real,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct TaggedPartition {
    breakpoints: Vec<Rational>,
    tags: Vec<Real>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    breakpoints: Vec<String>,
    tags: Vec<Real>,
}

impl TryFrom<PartitionRepr> for TaggedPartition {
    type Error = Error;

    fn try_from(r: PartitionRepr) -> Result<Self> {
        let b = r
            .breakpoints
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        TaggedPartition::new(b, r.tags)
    }
}

impl From<TaggedPartition> for PartitionRepr {
    fn from(p: TaggedPartition) -> Self {
        PartitionRepr {
            breakpoints: p.breakpoints.into_iter().map(format_rational).collect(),
            tags: p.tags,
        }
    }
}

/// How [`uniform_partition`] places tags.
#[derive(Clone, Debug, PartialEq)]
pub enum TagRule {
    Left,
    Right,
    Mid,
    Custom(Vec<Real>),
}

impl std::str::FromStr for TagRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(TagRule::Left),
            "right" => Ok(TagRule::Right),
            "mid" => Ok(TagRule::Mid),
            other => Err(Error::InvalidArgument(format!(
                "unknown tag rule `{other}` (expected left, right or mid)"
            ))),
        }
    }
}

fn tag_in(t: &Real, lo: Rational, hi: Rational) -> bool {
    match t.as_rational() {
        Some(r) => lo <= r && r <= hi,
        None => rational_to_f64(lo) <= t.value() && t.value() <= rational_to_f64(hi),
    }
}

impl TaggedPartition {
    pub fn new(breakpoints: Vec<Rational>, tags: Vec<Real>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidPartition("need at least one interval".into()));
        }
        if !breakpoints[0].is_zero() || !breakpoints[breakpoints.len() - 1].is_one() {
            return Err(Error::InvalidPartition(
                "breakpoints must run from 0 to 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if tags.len() != breakpoints.len() - 1 {
            return Err(Error::InvalidPartition(format!(
                "{} tags for {} intervals",
                tags.len(),
                breakpoints.len() - 1
            )));
        }
        for (i, t) in tags.iter().enumerate() {
            if !tag_in(t, breakpoints[i], breakpoints[i + 1]) {
                return Err(Error::InvalidPartition(format!(
                    "tag {t} outside [{}, {}]",
                    format_rational(breakpoints[i]),
                    format_rational(breakpoints[i + 1])
                )));
            }
        }
        Ok(TaggedPartition { breakpoints, tags })
    }

    /// Number of intervals.
    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn tags(&self) -> &[Real] {
        &self.tags
    }

    pub fn interval(&self, i: usize) -> (Rational, Rational) {
        (self.breakpoints[i], self.breakpoints[i + 1])
    }

    pub fn length(&self, i: usize) -> Rational {
        self.breakpoints[i + 1] - self.breakpoints[i]
    }

    pub fn lengths(&self) -> impl Iterator<Item = Rational> + '_ {
        self.breakpoints.windows(2).map(|w| w[1] - w[0])
    }

    /// `d(Γ) = max_i |Δ_i|`.
    pub fn diameter(&self) -> Rational {
        self.lengths().max().expect("at least one interval")
    }

    pub fn diameter_f64(&self) -> f64 {
        rational_to_f64(self.diameter())
    }

    /// Same breakpoints, new tags.
    pub fn with_tags(&self, tags: Vec<Real>) -> Result<Self> {
        TaggedPartition::new(self.breakpoints.clone(), tags)
    }

    /// Same partition with tag `i` replaced.
    pub fn with_tag(&self, i: usize, tag: Real) -> Result<Self> {
        let mut tags = self.tags.clone();
        tags[i] = tag;
        self.with_tags(tags)
    }
}

/// `n` equal intervals.
pub fn uniform_partition(n: u64, rule: &TagRule) -> Result<TaggedPartition> {
    if n == 0 {
        return Err(Error::InvalidPartition("n must be at least 1".into()));
    }
    let n_i = i64::try_from(n).map_err(|_| Error::InvalidArgument(format!("n = {n} too large")))?;
    let breakpoints: Vec<Rational> = (0..=n_i).map(|i| Rational::new(i, n_i)).collect();
    let tags = match rule {
        TagRule::Left => (0..n_i).map(|i| Real::ratio(i, n_i)).collect(),
        TagRule::Right => (1..=n_i).map(|i| Real::ratio(i, n_i)).collect(),
        TagRule::Mid => (0..n_i).map(|i| Real::ratio(2 * i + 1, 2 * n_i)).collect(),
        TagRule::Custom(t) => t.clone(),
    };
    TaggedPartition::new(breakpoints, tags)
}

/// `Γ_p`: intervals `[(2i−2)/2p, 2i/2p]` tagged at `(2i−1)/2p`.
pub fn prime_partition(p: u64) -> Result<TaggedPartition> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let p = i64::try_from(p).map_err(|_| Error::InvalidArgument("prime too large".into()))?;
    let breakpoints = (0..=p).map(|i| Rational::new(2 * i, 2 * p)).collect();
    let tags = (1..=p).map(|i| Real::ratio(2 * i - 1, 2 * p)).collect();
    TaggedPartition::new(breakpoints, tags)
}

const RANDOM_GRID_BITS: u32 = 20;

/// Upper limit on intervals drawn by [`random_partition`].
pub const MAX_RANDOM_INTERVALS: usize = 1 << 24;

/// A random partition with `d(Γ) ≤ max_diameter` and generic tags.
///
/// Breakpoints sit on a dyadic grid fine enough to resolve `max_diameter`.
/// Every interval except possibly the last has length above
/// `max_diameter / 2`, so the diameter lies in `(max_diameter/2, max_diameter]`
/// whenever more than one interval is drawn.
pub fn random_partition(max_diameter: f64, seed: u64) -> Result<TaggedPartition> {
    if !(max_diameter > 0.0 && max_diameter <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "max_diameter must lie in (0, 1], got {max_diameter}"
        )));
    }
    if 2.0 / max_diameter > MAX_RANDOM_INTERVALS as f64 {
        return Err(Error::InvalidArgument(format!(
            "max_diameter {max_diameter} would need more than {MAX_RANDOM_INTERVALS} intervals"
        )));
    }
    let extra = (-max_diameter.log2()).ceil().max(0.0) as u32;
    let bits = (RANDOM_GRID_BITS + extra).min(52);
    let grid: i64 = 1 << bits;
    let cap = ((max_diameter * grid as f64).floor() as i64).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cuts = vec![0i64];
    let mut pos = 0i64;
    while grid - pos > cap {
        let step = rng.random_range(cap / 2 + 1..=cap);
        pos += step;
        cuts.push(pos);
    }
    cuts.push(grid);
    let breakpoints: Vec<Rational> = cuts.iter().map(|&c| Rational::new(c, grid)).collect();
    let tags = cuts
        .windows(2)
        .map(|w| {
            let lo = w[0] as f64 / grid as f64;
            let hi = w[1] as f64 / grid as f64;
            Real::generic(lo + rng.random::<f64>() * (hi - lo))
        })
        .collect();
    TaggedPartition::new(breakpoints, tags)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    UniformDoubling,
    Primes,
    Random,
}

impl std::str::FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-doubling" => Ok(ScheduleKind::UniformDoubling),
            "primes" => Ok(ScheduleKind::Primes),
            "random" => Ok(ScheduleKind::Random),
            other => Err(Error::InvalidArgument(format!(
                "unknown schedule `{other}` (expected uniform-doubling, primes or random)"
            ))),
        }
    }
}

/// A sequence of partitions with strictly decreasing diameters.
///
/// * uniform-doubling: `n = 2, 4, …, 2^length` with `rule` tags;
/// * primes: `Γ_p` for the first `length` primes;
/// * random: `random_partition(2^{-k}, seed + k)` for `k = 1..=length`.
pub fn schedule(
    kind: ScheduleKind,
    length: usize,
    rule: &TagRule,
    seed: u64,
) -> Result<Vec<TaggedPartition>> {
    if length == 0 {
        return Err(Error::InvalidArgument(
            "schedule length must be at least 1".into(),
        ));
    }
    match kind {
        ScheduleKind::UniformDoubling => {
            if length > 40 {
                return Err(Error::InvalidArgument(
                    "uniform-doubling schedules stop at 2^40".into(),
                ));
            }
            (1..=length as u32)
                .map(|k| uniform_partition(1u64 << k, rule))
                .collect()
        }
        ScheduleKind::Primes => first_primes(length)
            .into_iter()
            .map(prime_partition)
            .collect(),
        ScheduleKind::Random => {
            if length > 22 {
                return Err(Error::InvalidArgument(
                    "random schedules stop at diameter 2^-22".into(),
                ));
            }
            (1..=length as u32)
                .map(|k| random_partition((0.5f64).powi(k as i32), seed.wrapping_add(u64::from(k))))
                .collect()
        }
    }
}

/// Largest denominator among the breakpoints.
pub fn max_denominator(p: &TaggedPartition) -> i64 {
    p.breakpoints()
        .iter()
        .map(|b| *b.denom())
        .max()
        .unwrap_or(1)
}

/// Float value of a rational breakpoint, for plotting.
pub fn breakpoint_values(p: &TaggedPartition) -> Vec<f64> {
    p.breakpoints()
        .iter()
        .map(|b| b.to_f64().unwrap_or(f64::NAN))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn diameters() {
        assert_eq!(
            uniform_partition(4, &TagRule::Mid).unwrap().diameter(),
            r(1, 4)
        );
        let p = TaggedPartition::new(
            vec![r(0, 1), r(1, 10), r(1, 1)],
            vec![Real::ratio(0, 1), Real::ratio(1, 2)],
        )
        .unwrap();
        assert_eq!(p.diameter(), r(9, 10));
        assert_eq!(prime_partition(5).unwrap().diameter(), r(1, 5));
    }

    #[test]
    fn uniform_rules() {
        let tags = |n, rule| uniform_partition(n, &rule).unwrap().tags().to_vec();
        assert_eq!(
            tags(2, TagRule::Mid),
            vec![Real::ratio(1, 4), Real::ratio(3, 4)]
        );
        assert_eq!(tags(1, TagRule::Left), vec![Real::integer(0)]);
        assert_eq!(
            tags(3, TagRule::Right),
            vec![Real::ratio(1, 3), Real::ratio(2, 3), Real::integer(1)]
        );
        assert!(uniform_partition(2, &TagRule::Custom(vec![Real::ratio(1, 4)])).is_err());
        assert!(uniform_partition(
            2,
            &TagRule::Custom(vec![Real::ratio(3, 4), Real::ratio(3, 4)])
        )
        .is_err());
        assert!(uniform_partition(0, &TagRule::Mid).is_err());
    }

    #[test]
    fn prime_partitions() {
        let p2 = prime_partition(2).unwrap();
        assert_eq!(p2.breakpoints(), &[r(0, 1), r(1, 2), r(1, 1)]);
        assert_eq!(p2.tags(), &[Real::ratio(1, 4), Real::ratio(3, 4)]);
        let p3 = prime_partition(3).unwrap();
        assert_eq!(
            p3.tags(),
            &[Real::ratio(1, 6), Real::ratio(3, 6), Real::ratio(5, 6)]
        );
        assert!(prime_partition(4).is_err());
        for p in first_primes(12) {
            let total: Rational = prime_partition(p).unwrap().lengths().sum();
            assert_eq!(total, Rational::one());
        }
    }

    #[test]
    fn random_partitions() {
        let a = random_partition(0.1, 7).unwrap();
        assert!(a.diameter_f64() <= 0.1);
        assert!(a.diameter_f64() > 0.05);
        assert_eq!(a, random_partition(0.1, 7).unwrap());
        assert_ne!(a, random_partition(0.1, 8).unwrap());
        let one = random_partition(1.0, 3).unwrap();
        assert_eq!(one.len(), 1);
        assert!(random_partition(0.0, 1).is_err());
        assert!(random_partition(1e-5, 1).unwrap().diameter_f64() <= 1e-5);
        assert!(random_partition(1e-9, 1).is_err());
    }

    #[test]
    fn schedules_decrease() {
        let u = schedule(ScheduleKind::UniformDoubling, 3, &TagRule::Mid, 0).unwrap();
        assert_eq!(
            u.iter().map(TaggedPartition::len).collect::<Vec<_>>(),
            vec![2, 4, 8]
        );
        let p = schedule(ScheduleKind::Primes, 4, &TagRule::Mid, 0).unwrap();
        assert_eq!(
            p.iter().map(TaggedPartition::len).collect::<Vec<_>>(),
            vec![2, 3, 5, 7]
        );
        let rnd = schedule(ScheduleKind::Random, 12, &TagRule::Mid, 5).unwrap();
        for s in [&u, &p, &rnd] {
            assert!(s.windows(2).all(|w| w[1].diameter() < w[0].diameter()));
        }
    }

    #[test]
    fn json_round_trip() {
        let p = prime_partition(3).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(
            json,
            r#"{"breakpoints":["0","1/3","2/3","1"],"tags":["1/6","1/2","5/6"]}"#
        );
        assert_eq!(serde_json::from_str::<TaggedPartition>(&json).unwrap(), p);
        let q = random_partition(0.5, 1).unwrap();
        let back: TaggedPartition =
            serde_json::from_str(&serde_json::to_string(&q).unwrap()).unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<TaggedPartition>(
            r#"{"breakpoints":["0","1"],"tags":["2"]}"#
        )
        .is_err());
    }
}
