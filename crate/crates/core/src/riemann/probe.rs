//! Empirical reachability probes for elements of `I(F)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{riemann_sum, set_distance};
use crate::error::{Error, Result};
use crate::multifn::Multifunction;
use crate::partition::TaggedPartition;
use crate::real::{rational_to_f64, Rational, Real};
use crate::sets::{minkowski_sum, scale, CompactSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    /// Full passes over the intervals per partition.
    pub sweeps: usize,
    /// A step counts as reached when its best distance is at most `slack · d(Γ)`.
    pub slack: f64,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            sweeps: 4,
            slack: 2.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeStep {
    pub intervals: usize,
    pub diameter: f64,
    /// Best distance found on this partition.
    pub distance: f64,
    /// Best distance over this and all earlier partitions.
    pub best_so_far: f64,
    pub within_slack: bool,
    pub tags: Vec<Real>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub target: CompactSet,
    pub steps: Vec<ProbeStep>,
    /// Every step is within `slack · d(Γ)` of the target.
    pub reached: bool,
}

impl MembershipReport {
    /// Columns `intervals,diameter,distance,best_so_far`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("intervals,diameter,distance,best_so_far\n");
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{}\n",
                s.intervals, s.diameter, s.distance, s.best_so_far
            ));
        }
        out
    }
}

fn interval_seed(seed: u64, step: usize, interval: usize) -> u64 {
    seed ^ (step as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (interval as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
}

/// Candidate tags for interval `[lo, hi]`: both ends, the midpoint, one
/// seeded generic tag, and the multifunction's special tags, sorted with
/// duplicates removed.
pub fn tag_pool(f: &dyn Multifunction, lo: Rational, hi: Rational, seed: u64) -> Vec<Real> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (rational_to_f64(lo), rational_to_f64(hi));
    let mut generic = a + rng.random::<f64>() * (b - a);
    if generic <= a || generic >= b {
        generic = 0.5 * (a + b);
    }
    let mut pool = vec![
        Real::exact(lo),
        Real::exact((lo + hi) / 2),
        Real::exact(hi),
        Real::generic(generic),
    ];
    pool.extend(f.special_tags(lo, hi));
    pool.sort_by(|x, y| x.cmp_value(y).then_with(|| y.is_exact().cmp(&x.is_exact())));
    pool.dedup_by(|x, y| x.same_as(y));
    pool
}

fn objective(f: &dyn Multifunction, gamma: &TaggedPartition, target: &CompactSet) -> Result<f64> {
    let s = riemann_sum(f, gamma)?;
    Ok(set_distance(f, &s, target)?.upper)
}

/// Greedy coordinate descent over tags on each partition of `schedule`,
/// minimizing `d_H(S(F,Γ,T), target)`. Ties keep the lowest tag.
pub fn membership_probe(
    f: &dyn Multifunction,
    target: &CompactSet,
    schedule: &[TaggedPartition],
    opts: &ProbeOptions,
) -> Result<MembershipReport> {
    if !f.materializable() {
        return Err(Error::Unsupported(format!(
            "{} cannot be probed by materialized sums",
            f.name()
        )));
    }
    target.check(f.space())?;
    let mut steps = Vec::with_capacity(schedule.len());
    let mut best_so_far = f64::INFINITY;
    for (k, gamma) in schedule.iter().enumerate() {
        let pools: Vec<Vec<Real>> = (0..gamma.len())
            .map(|i| {
                let (lo, hi) = gamma.interval(i);
                tag_pool(f, lo, hi, interval_seed(opts.seed, k, i))
            })
            .collect();
        let mut current = gamma.clone();
        let mut best = objective(f, &current, target)?;
        for _ in 0..opts.sweeps {
            let mut improved = false;
            for (i, pool) in pools.iter().enumerate() {
                let mut choice: Option<(f64, Real)> = None;
                for tag in pool {
                    let trial = current.with_tag(i, *tag)?;
                    let d = objective(f, &trial, target)?;
                    if choice.as_ref().is_none_or(|(bd, _)| d < *bd) {
                        choice = Some((d, *tag));
                    }
                }
                if let Some((d, tag)) = choice {
                    if d < best
                        || (d == best
                            && !tag.same_as(&current.tags()[i])
                            && tag.cmp_value(&current.tags()[i]).is_lt())
                    {
                        improved |= d < best;
                        best = d;
                        current = current.with_tag(i, tag)?;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        best_so_far = best_so_far.min(best);
        let diameter = gamma.diameter_f64();
        steps.push(ProbeStep {
            intervals: gamma.len(),
            diameter,
            distance: best,
            best_so_far,
            within_slack: best <= opts.slack * diameter,
            tags: current.tags().to_vec(),
        });
    }
    let reached = !steps.is_empty() && steps.iter().all(|s| s.within_slack);
    Ok(MembershipReport {
        target: target.clone(),
        steps,
        reached,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinationReport {
    pub lambda: Real,
    pub probe: MembershipReport,
}

/// Probes `λA + (1−λ)B`; Minkowski sums of polytopes are already hulled.
pub fn convex_combination_probe(
    f: &dyn Multifunction,
    a: &CompactSet,
    b: &CompactSet,
    lambda: &Real,
    schedule: &[TaggedPartition],
    opts: &ProbeOptions,
) -> Result<CombinationReport> {
    if lambda.is_negative() || lambda.value() > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "λ = {lambda} outside [0, 1]"
        )));
    }
    let target = minkowski_sum(
        f.space(),
        &scale(lambda, a)?,
        &scale(&lambda.one_minus(), b)?,
    )?;
    Ok(CombinationReport {
        lambda: *lambda,
        probe: membership_probe(f, &target, schedule, opts)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarReport {
    pub center: CompactSet,
    /// One row per candidate: the probes along the segment to the center.
    pub rays: Vec<Vec<CombinationReport>>,
    pub all_reached: bool,
}

/// Probes `λ·candidate + (1−λ)·center` for every candidate and `λ` in the grid.
pub fn star_probe(
    f: &dyn Multifunction,
    center: &CompactSet,
    candidates: &[CompactSet],
    lambdas: &[Real],
    schedule: &[TaggedPartition],
    opts: &ProbeOptions,
) -> Result<StarReport> {
    let mut rays = Vec::with_capacity(candidates.len());
    for c in candidates {
        let mut ray = Vec::with_capacity(lambdas.len());
        for l in lambdas {
            ray.push(convex_combination_probe(f, c, center, l, schedule, opts)?);
        }
        rays.push(ray);
    }
    let all_reached = rays.iter().flatten().all(|r| r.probe.reached);
    Ok(StarReport {
        center: center.clone(),
        rays,
        all_reached,
    })
}
