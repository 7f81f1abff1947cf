//! Seeded property suites, shared by the `selftest` command and the
//! acceptance tests.
//!
//! Every suite draws its instances from one ChaCha stream seeded by the
//! caller, so an outcome is a pure function of `(instances, seed)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::infratype::{min_sign_norm, random_collection, shevchenko_rhs, EXACT_THRESHOLD};
use crate::multifn::{random_step_multifunction, Multifunction, RandomStepShape};
use crate::partition::{uniform_partition, TagRule};
use crate::radstrom::{
    additivity_check, embed, planar_support_distance, sample_distance, scale_property_check,
};
use crate::riemann::compare_conv;
use crate::sets::{convex_hull, hausdorff_distance, minkowski_sum, CompactSet};
use crate::space::{circle_directions, Space, Vector};

/// Absolute tolerance of the geometric suites.
pub const TOLERANCE: f64 = 1e-9;

/// Distance from sampled to exact support distance allowed at 10⁴ planar directions.
pub const DENSE_SAMPLE_TOLERANCE: f64 = 1e-3;

pub const DENSE_SAMPLE_DIRECTIONS: usize = 10_000;

/// Uniform schedule sizes for the conv comparison.
pub const SHEVCHENKO_SIZES: [u64; 7] = [4, 8, 16, 32, 64, 128, 256];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub instances: usize,
    pub violations: usize,
    /// Largest observed excess over the asserted bound; negative means slack.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

struct Tally {
    name: &'static str,
    instances: usize,
    violations: usize,
    worst: f64,
    tolerance: f64,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tally {
            name,
            instances: 0,
            violations: 0,
            worst: f64::NEG_INFINITY,
            tolerance,
        }
    }

    /// Records `excess = measured − bound`; violated when above the tolerance.
    fn record(&mut self, excess: f64) {
        self.worst = self.worst.max(excess);
        if excess.is_nan() || excess > self.tolerance {
            self.violations += 1;
        }
    }

    /// Records a condition that must hold exactly.
    fn require(&mut self, ok: bool) {
        if !ok {
            self.violations += 1;
        }
    }

    fn next(&mut self) {
        self.instances += 1;
    }

    fn finish(self) -> SuiteOutcome {
        SuiteOutcome {
            name: self.name.to_string(),
            instances: self.instances,
            violations: self.violations,
            worst: self.worst,
            tolerance: self.tolerance,
            passed: self.violations == 0,
        }
    }
}

/// A cloud of `3..=10` points uniform in the cube `[−1, 1]^d`.
pub fn random_cloud(space: &Space, rng: &mut ChaCha8Rng) -> Result<CompactSet> {
    let d = space.dimension().unwrap_or(1);
    let n = rng.random_range(3..=10);
    let pts = (0..n)
        .map(|_| {
            Vector::dense(
                (0..d)
                    .map(|_| rng.random_range(-1.0..=1.0))
                    .collect::<Vec<f64>>(),
            )
        })
        .collect();
    CompactSet::cloud(pts)
}

fn euclidean_spaces() -> [Space; 2] {
    [Space::euclidean(2), Space::euclidean(3)]
}

fn mixed_spaces() -> Vec<Space> {
    ["l1:2", "l2:3", "linf:2", "l3/2:3"]
        .iter()
        .map(|s| s.parse().expect("built-in space"))
        .collect()
}

/// `d_H(conv A, conv B) ≤ d_H(A, B)`.
pub fn hull_contraction(instances: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new("hull-contraction", TOLERANCE);
    for i in 0..instances {
        let s = &euclidean_spaces()[i % 2];
        let (a, b) = (random_cloud(s, &mut rng)?, random_cloud(s, &mut rng)?);
        let hulls = hausdorff_distance(s, &convex_hull(s, &a)?, &convex_hull(s, &b)?)?;
        t.record(hulls - hausdorff_distance(s, &a, &b)?);
        t.next();
    }
    Ok(t.finish())
}

/// `conv(A + B) = conv A + conv B`, compared as vertex sets.
pub fn hull_minkowski(instances: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new("hull-minkowski", TOLERANCE);
    for i in 0..instances {
        let s = &euclidean_spaces()[i % 2];
        let (a, b) = (random_cloud(s, &mut rng)?, random_cloud(s, &mut rng)?);
        let lhs = convex_hull(s, &minkowski_sum(s, &a, &b)?)?;
        let rhs = minkowski_sum(s, &convex_hull(s, &a)?, &convex_hull(s, &b)?)?;
        let vertices = |p: &CompactSet| CompactSet::cloud(p.points().unwrap_or_default().to_vec());
        t.record(hausdorff_distance(s, &vertices(&lhs)?, &vertices(&rhs)?)?);
        t.next();
    }
    Ok(t.finish())
}

/// Identity, exact symmetry and the triangle inequality for `d_H` on clouds.
pub fn metric_axioms(instances: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spaces = mixed_spaces();
    let mut t = Tally::new("metric-axioms", TOLERANCE);
    for i in 0..instances {
        let s = &spaces[i % spaces.len()];
        let (a, b, c) = (
            random_cloud(s, &mut rng)?,
            random_cloud(s, &mut rng)?,
            random_cloud(s, &mut rng)?,
        );
        let ab = hausdorff_distance(s, &a, &b)?;
        t.record(hausdorff_distance(s, &a, &a)?);
        t.record(-ab);
        t.require(ab == hausdorff_distance(s, &b, &a)?);
        t.record(hausdorff_distance(s, &a, &c)? - ab - hausdorff_distance(s, &b, &c)?);
        t.next();
    }
    Ok(t.finish())
}

/// `φ(A + B) = φA + φB` and `φ(λA) = λ φA` on sampled directions.
pub fn embedding_linearity(instances: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spaces = mixed_spaces();
    let mut t = Tally::new("embedding-linearity", TOLERANCE);
    for i in 0..instances {
        let s = &spaces[i % spaces.len()];
        let dirs = s.sample_directions(64, seed ^ i as u64)?;
        let (a, b) = (random_cloud(s, &mut rng)?, random_cloud(s, &mut rng)?);
        let lambda = rng.random_range(0.0..=3.0);
        t.record(additivity_check(s, &a, &b, &dirs)?);
        t.record(scale_property_check(s, &a, lambda, &dirs)?);
        t.next();
    }
    Ok(t.finish())
}

/// Sampled support distance never exceeds `d_H` of the hulls, and in the
/// plane 10⁴ equispaced directions come within [`DENSE_SAMPLE_TOLERANCE`].
pub fn sample_distance_bound(instances: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let circle = circle_directions(DENSE_SAMPLE_DIRECTIONS);
    let mut t = Tally::new("sample-distance", TOLERANCE);
    let mut dense_violations = 0;
    for i in 0..instances {
        let s = &euclidean_spaces()[i % 2];
        let a = convex_hull(s, &random_cloud(s, &mut rng)?)?;
        let b = convex_hull(s, &random_cloud(s, &mut rng)?)?;
        let exact = hausdorff_distance(s, &a, &b)?;
        let dirs = s.sample_directions(128, seed ^ i as u64)?;
        t.record(sample_distance(&embed(s, &a, &dirs)?, &embed(s, &b, &dirs)?)? - exact);
        if s.dimension() == Some(2) {
            let dense = sample_distance(&embed(s, &a, &circle)?, &embed(s, &b, &circle)?)?;
            t.record(dense - exact);
            if (exact - dense).is_nan() || exact - dense > DENSE_SAMPLE_TOLERANCE {
                dense_violations += 1;
            }
            t.record((planar_support_distance(s, &a, &b)? - exact).abs());
        }
        t.next();
    }
    let mut out = t.finish();
    out.violations += dense_violations;
    out.passed = out.violations == 0;
    Ok(out)
}

/// `min_a ‖Σ a_k x_k‖ ≤ (Σ ‖x_k‖²)^{1/2}` in Euclidean spaces, `n ≤ 16`.
pub fn hilbert_infratype(instances: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new("hilbert-infratype", TOLERANCE);
    for i in 0..instances {
        let s = Space::euclidean(2 + i % 3);
        let n = rng.random_range(1..=16);
        let xs = random_collection(&s, n, &mut rng)?;
        let m = min_sign_norm(&s, &xs, EXACT_THRESHOLD)?;
        let mut sq = 0.0;
        for x in &xs {
            sq += s.norm(x)?.powi(2);
        }
        let rhs = sq.sqrt();
        // Relative excess: lengths are log-normal and span several decades.
        t.record((m.norm - rhs) / rhs.max(1.0));
        t.next();
    }
    Ok(t.finish())
}

/// `min ‖e₁ ± e₂‖₁ / (‖e₁‖² + ‖e₂‖²)^{1/2}`, which is `√2`.
pub fn l1_pair_ratio() -> Result<f64> {
    let s: Space = "l1:2".parse()?;
    let xs = [s.basis(0)?, s.basis(1)?];
    let m = min_sign_norm(&s, &xs, EXACT_THRESHOLD)?;
    Ok(m.norm / 2f64.sqrt())
}

/// `d_H(S(F), S(conv F)) ≤ (2/(√2−1)) M(F) d(Γ)^{1/2}` for random step
/// multifunctions in `R²` and `R³`, on uniform partitions of every size in
/// [`SHEVCHENKO_SIZES`].
pub fn shevchenko_bound(multifunctions: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut t = Tally::new("shevchenko-bound", 0.0);
    let partitions: Vec<_> = SHEVCHENKO_SIZES
        .iter()
        .map(|&n| uniform_partition(n, &TagRule::Mid))
        .collect::<Result<_>>()?;
    for i in 0..multifunctions {
        let s = &euclidean_spaces()[i % 2];
        let f =
            random_step_multifunction(s, RandomStepShape::default(), seed.wrapping_add(i as u64))?;
        for gamma in &partitions {
            let r = compare_conv(&f, gamma, 1.0, 2.0)?;
            debug_assert_eq!(
                r.rhs,
                shevchenko_rhs(1.0, 2.0, f.bound(), gamma.diameter_f64())?
            );
            t.record(r.lhs.upper - r.rhs);
        }
        t.next();
    }
    Ok(t.finish())
}

/// The geometric and infratype suites at the given size.
pub fn property_suites(instances: usize, seed: u64) -> Result<Vec<SuiteOutcome>> {
    Ok(vec![
        hull_contraction(instances, seed)?,
        hull_minkowski(instances, seed.wrapping_add(1))?,
        metric_axioms(instances, seed.wrapping_add(2))?,
        embedding_linearity(instances, seed.wrapping_add(3))?,
        sample_distance_bound(instances, seed.wrapping_add(4))?,
        hilbert_infratype(instances, seed.wrapping_add(5))?,
    ])
}
