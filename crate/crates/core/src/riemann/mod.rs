//! Riemann sums `S(F, Γ, T) = Σ |Δ_i| F(ξ_i)` and what can be learned from them.

mod empty;
mod probe;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infratype::shevchenko_rhs;
use crate::multifn::{evaluate, Multifunction};
use crate::partition::TaggedPartition;
use crate::real::{format_rational, rational_to_f64, Rational, Real};
use crate::sets::{
    convex_hull, hausdorff_report, hull_excess, minkowski_sum, scale, Bracket, CompactSet,
    GapOptions, HausdorffMethod,
};
use crate::space::{Functional, Space};

pub use empty::{empty_example_verifier, EmptyCertificate};
pub use probe::{
    convex_combination_probe, membership_probe, star_probe, tag_pool, CombinationReport,
    MembershipReport, ProbeOptions, ProbeStep, StarReport,
};

/// `S(F, Γ, T)`. Runs of consecutive intervals with equal length and equal
/// value are summed by doubling, `kA = A + … + A`.
pub fn riemann_sum(f: &dyn Multifunction, gamma: &TaggedPartition) -> Result<CompactSet> {
    if !f.materializable() {
        return Err(Error::Unsupported(format!(
            "{} has values that cannot be materialized; use sum_support",
            f.name()
        )));
    }
    let space = f.space();
    let mut acc: Option<CompactSet> = None;
    for (len, value, count) in runs(f, gamma)? {
        let term = minkowski_multiple(space, &scale(&Real::exact(len), &value)?, count)?;
        acc = Some(match acc {
            None => term,
            Some(a) => minkowski_sum(space, &a, &term)?,
        });
    }
    Ok(acc.expect("partitions have at least one interval"))
}

/// Maximal runs of intervals sharing length and value, as `(length, value, count)`.
fn runs(
    f: &dyn Multifunction,
    gamma: &TaggedPartition,
) -> Result<Vec<(Rational, CompactSet, usize)>> {
    let mut out: Vec<(Rational, CompactSet, usize)> = Vec::new();
    for (i, t) in gamma.tags().iter().enumerate() {
        let (len, value) = (gamma.length(i), evaluate(f, t)?);
        match out.last_mut() {
            Some((l, v, c)) if *l == len && *v == value => *c += 1,
            _ => out.push((len, value, 1)),
        }
    }
    Ok(out)
}

/// The `k`-fold Minkowski sum `A + … + A`, by binary doubling.
fn minkowski_multiple(space: &Space, a: &CompactSet, k: usize) -> Result<CompactSet> {
    let (mut base, mut k) = (a.clone(), k);
    let mut acc: Option<CompactSet> = None;
    loop {
        if k & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(x) => minkowski_sum(space, &x, &base)?,
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        base = minkowski_sum(space, &base, &base)?;
    }
    Ok(acc.expect("k ≥ 1"))
}

/// `h_{S(F,Γ,T)}(f) = Σ |Δ_i| h_{F(ξ_i)}(f)`.
pub fn sum_support(f: &dyn Multifunction, gamma: &TaggedPartition, g: &Functional) -> Result<f64> {
    let mut total = 0.0;
    for (i, t) in gamma.tags().iter().enumerate() {
        total += rational_to_f64(gamma.length(i)) * f.support_at(t, g)?;
    }
    Ok(total)
}

/// Hausdorff distance as a bracket, whatever the pair of representations.
pub fn set_distance(f: &dyn Multifunction, a: &CompactSet, b: &CompactSet) -> Result<Bracket> {
    Ok(hausdorff_report(f.space(), a, b, &GapOptions::default())?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converged,
    NotCauchy,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub index: usize,
    pub intervals: usize,
    pub diameter: String,
    pub diameter_value: f64,
    /// Points, vertices or E-sum terms in the sum; absent when not materialized.
    pub size: Option<usize>,
    pub distance_to_previous: Option<Bracket>,
    pub distance_to_target: Option<Bracket>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumTrace {
    pub entries: Vec<TraceEntry>,
}

impl SumTrace {
    /// Columns `index,intervals,diameter,prev_lower,prev_upper,target_lower,target_upper`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "index,intervals,diameter,prev_lower,prev_upper,target_lower,target_upper\n",
        );
        let cell = |b: Option<Bracket>| match b {
            Some(b) => (b.lower.to_string(), b.upper.to_string()),
            None => (String::new(), String::new()),
        };
        for e in &self.entries {
            let (pl, pu) = cell(e.distance_to_previous);
            let (tl, tu) = cell(e.distance_to_target);
            out.push_str(&format!(
                "{},{},{},{pl},{pu},{tl},{tu}\n",
                e.index, e.intervals, e.diameter_value
            ));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    /// The last sum computed; absent when sums are not materialized.
    pub candidate: Option<CompactSet>,
    /// Bracket on the largest pairwise distance among the last `window` sums.
    pub cauchy_tail: Option<Bracket>,
    pub final_diameter: f64,
    pub verdict: Verdict,
    pub sums_computed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergeOptions {
    pub tolerance: f64,
    pub window: usize,
}

impl Default for ConvergeOptions {
    fn default() -> Self {
        ConvergeOptions {
            tolerance: 1e-6,
            window: 3,
        }
    }
}

/// Trailing-window Cauchy test along `schedule`.
///
/// The run stops at the first window whose sums are pairwise within
/// `tolerance`. A schedule shorter than the window, or a sum over the point
/// cap, ends with `budget-exhausted`. When `F` cannot be materialized the
/// distances are lower bounds from the multifunction's witness functionals,
/// so `converged` is never reported for it.
pub fn converge(
    f: &dyn Multifunction,
    schedule: &[TaggedPartition],
    target: Option<&CompactSet>,
    opts: &ConvergeOptions,
) -> Result<(LimitEstimate, SumTrace)> {
    if opts.window < 2 {
        return Err(Error::InvalidArgument(
            "the Cauchy window needs at least two sums".into(),
        ));
    }
    if schedule
        .windows(2)
        .any(|w| w[1].diameter() >= w[0].diameter())
    {
        return Err(Error::InvalidArgument(
            "schedule diameters must strictly decrease".into(),
        ));
    }
    let materialize = f.materializable();
    let mut sums: Vec<Option<CompactSet>> = Vec::new();
    // dist[j][i] for i < j: distance between sums i and j.
    let mut dist: Vec<Vec<Bracket>> = Vec::new();
    let mut entries = Vec::new();
    let mut tail = None;
    let mut verdict = Verdict::BudgetExhausted;
    for (k, gamma) in schedule.iter().enumerate() {
        let sum = if materialize {
            match riemann_sum(f, gamma) {
                Ok(s) => Some(s),
                Err(Error::TooManyPoints { .. }) => break,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        let lo = k.saturating_sub(opts.window - 1);
        let mut row = vec![Bracket::exact(0.0); k];
        for i in lo..k {
            row[i] = pair_distance(f, &schedule[i], gamma, sums[i].as_ref(), sum.as_ref())?;
        }
        let to_target = match (target, &sum) {
            (Some(t), Some(s)) => Some(set_distance(f, s, t)?),
            _ => None,
        };
        entries.push(TraceEntry {
            index: k,
            intervals: gamma.len(),
            diameter: format_rational(gamma.diameter()),
            diameter_value: gamma.diameter_f64(),
            size: sum.as_ref().map(CompactSet::len),
            distance_to_previous: (k > 0).then(|| row[k - 1]),
            distance_to_target: to_target,
        });
        dist.push(row);
        sums.push(sum);
        if k + 1 >= opts.window {
            let mut t = Bracket::exact(0.0);
            for row in &dist[lo..=k] {
                for d in &row[lo..] {
                    t = t.max(*d);
                }
            }
            tail = Some(t);
            if t.upper <= opts.tolerance {
                verdict = Verdict::Converged;
                break;
            }
            verdict = Verdict::NotCauchy;
        }
    }
    let computed = sums.len();
    if computed < schedule.len() && verdict != Verdict::Converged {
        verdict = Verdict::BudgetExhausted;
    }
    let estimate = LimitEstimate {
        candidate: sums.last().cloned().flatten(),
        cauchy_tail: tail,
        final_diameter: schedule
            .get(computed.saturating_sub(1))
            .map_or(1.0, TaggedPartition::diameter_f64),
        verdict,
        sums_computed: computed,
    };
    Ok((estimate, SumTrace { entries }))
}

/// `d_H` between two sums; from witness functionals when not materialized:
/// `d_H(A, B) ≥ |h_A(g) − h_B(g)| / ‖g‖_*`, and `d_H ≤ 2M` always.
fn pair_distance(
    f: &dyn Multifunction,
    ga: &TaggedPartition,
    gb: &TaggedPartition,
    a: Option<&CompactSet>,
    b: Option<&CompactSet>,
) -> Result<Bracket> {
    if let (Some(a), Some(b)) = (a, b) {
        return set_distance(f, a, b);
    }
    let mut lower: f64 = 0.0;
    for g in f.witness_functionals(ga, gb)? {
        let norm = f.space().dual_norm(&g)?;
        if norm > 0.0 {
            let gap = (sum_support(f, ga, &g)? - sum_support(f, gb, &g)?).abs();
            lower = lower.max(gap / norm);
        }
    }
    Ok(Bracket {
        lower,
        upper: (2.0 * f.bound()).max(lower),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareConvReport {
    /// `d_H(S(F,Γ,T), S(conv F,Γ,T))`.
    pub lhs: Bracket,
    pub method: HausdorffMethod,
    /// `C₁ M(F) d(Γ)^{(p−1)/p}`.
    pub rhs: f64,
    pub bound_m: f64,
    pub diameter: f64,
    pub sum_points: usize,
    pub hull_vertices: usize,
    /// `lhs.upper ≤ rhs`.
    pub holds: bool,
}

/// Measures how far a Riemann sum is from the sum of the hulled
/// multifunction, against the bound for infratype `p` with constant `c`.
pub fn compare_conv(
    f: &dyn Multifunction,
    gamma: &TaggedPartition,
    c: f64,
    p: f64,
) -> Result<CompareConvReport> {
    if f.space().dimension().is_none() {
        return Err(Error::Unsupported(
            "compare_conv needs a finite-dimensional space".into(),
        ));
    }
    let sum = riemann_sum(f, gamma)?;
    // conv of a Minkowski sum is the sum of the convs, and k conv A = conv A + … + conv A.
    let mut conv_acc: Option<CompactSet> = None;
    for (len, value, count) in runs(f, gamma)? {
        let term = convex_hull(f.space(), &scale(&Real::exact(len * count as i64), &value)?)?;
        conv_acc = Some(match conv_acc {
            None => term,
            Some(a) => minkowski_sum(f.space(), &a, &term)?,
        });
    }
    let conv_sum = conv_acc.expect("non-empty partition");
    let opts = GapOptions::default();
    let (lhs, method) = match sum {
        // S(F) ⊆ S(conv F), so only the hull side of d_H can be positive.
        CompactSet::PointCloud(_) => (
            hull_excess(f.space(), &sum, &conv_sum, &opts)?,
            HausdorffMethod::HullGap,
        ),
        _ => {
            let r = hausdorff_report(f.space(), &sum, &conv_sum, &opts)?;
            (r.value, r.method)
        }
    };
    let rhs = shevchenko_rhs(c, p, f.bound(), gamma.diameter_f64())?;
    Ok(CompareConvReport {
        lhs,
        method,
        rhs,
        bound_m: f.bound(),
        diameter: gamma.diameter_f64(),
        sum_points: sum.len(),
        hull_vertices: conv_sum.len(),
        holds: lhs.upper <= rhs,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::multifn::{
        constant_set, conv_lift, linear_singleton, random_step_multifunction, step_multifunction,
        Biorthogonal, L1Example, RandomStepShape, SharedMultifunction,
    };
    use crate::partition::{prime_partition, schedule, uniform_partition, ScheduleKind, TagRule};
    use crate::real::Rational;
    use crate::sets::{support_function, ESum};
    use crate::space::{Space, Vector};

    fn e1() -> Vector {
        Vector::dense([1.0, 0.0])
    }

    #[test]
    fn constant_singleton_sums_to_itself() {
        let s = Space::euclidean(2);
        let c = CompactSet::singleton(Vector::dense([0.3, -2.0]));
        let f = constant_set(&s, c.clone()).unwrap();
        for n in [1, 3, 7] {
            let sum = riemann_sum(&f, &uniform_partition(n, &TagRule::Left).unwrap()).unwrap();
            assert!(
                hausdorff_report(&s, &sum, &c, &GapOptions::default())
                    .unwrap()
                    .value
                    .upper
                    < 1e-15
            );
        }
    }

    #[test]
    fn two_point_constant_fills_a_grid() {
        // Oracle: {k/n · e1 : k = 0..n} by direct enumeration of tag choices.
        let s = Space::euclidean(2);
        let f = constant_set(&s, CompactSet::cloud(vec![s.zero(), e1()]).unwrap()).unwrap();
        for n in 1..=8u64 {
            let sum = riemann_sum(&f, &uniform_partition(n, &TagRule::Mid).unwrap()).unwrap();
            let expected: Vec<Vector> = (0..=n).map(|k| e1().scaled(k as f64 / n as f64)).collect();
            let exp = CompactSet::cloud(expected).unwrap();
            assert_eq!(sum.len(), (n + 1) as usize);
            assert!(
                hausdorff_report(&s, &sum, &exp, &GapOptions::default())
                    .unwrap()
                    .value
                    .upper
                    < 1e-12
            );
        }
    }

    #[test]
    fn l1_sums_on_prime_partitions() {
        let f = L1Example::new(2310).unwrap();
        let whole = ESum::single(
            2310,
            Rational::from_integer(1),
            Rational::from_integer(0),
            Rational::from_integer(1),
        )
        .unwrap();
        let s2 = riemann_sum(&f, &prime_partition(2).unwrap()).unwrap();
        assert_eq!(s2, CompactSet::ESum(whole.clone()));
        for p in [3u64, 5, 7, 11] {
            let sp = riemann_sum(&f, &prime_partition(p).unwrap()).unwrap();
            let d = sp.as_esum().unwrap().hausdorff(&whole).unwrap();
            assert_eq!(d, Rational::new(1, p as i64));
        }
    }

    #[test]
    fn support_is_additive_over_sums() {
        let s = Space::euclidean(2);
        let shape = RandomStepShape {
            pieces: 3,
            points_per_piece: 3,
        };
        let base: SharedMultifunction = Arc::new(random_step_multifunction(&s, shape, 4).unwrap());
        let f = conv_lift(base).unwrap();
        let gamma = uniform_partition(6, &TagRule::Mid).unwrap();
        let sum = riemann_sum(&f, &gamma).unwrap();
        for g in s.sample_directions(16, 3).unwrap() {
            let direct = support_function(&s, &sum, &g).unwrap();
            assert!((direct - sum_support(&f, &gamma, &g).unwrap()).abs() < 1e-9);
        }
        assert_eq!(
            sum_support(&f, &gamma, &Functional::dense([0.0, 0.0])).unwrap(),
            0.0
        );
    }

    #[test]
    fn linear_singleton_converges() {
        let s = Space::euclidean(2);
        let f = linear_singleton(&s, e1()).unwrap();
        let sched = schedule(ScheduleKind::UniformDoubling, 10, &TagRule::Right, 0).unwrap();
        let (est, trace) = converge(
            &f,
            &sched,
            None,
            &ConvergeOptions {
                tolerance: 0.01,
                window: 3,
            },
        )
        .unwrap();
        assert_eq!(est.verdict, Verdict::Converged);
        // Right tags: the sum is ((n+1)/2n)·e1.
        let n = sched[est.sums_computed - 1].len() as f64;
        let cand = est.candidate.unwrap();
        let v = &cand.points().unwrap()[0];
        assert!((v.as_dense().unwrap()[0] - (n + 1.0) / (2.0 * n)).abs() < 1e-15);
        assert!((v.as_dense().unwrap()[0] - 0.5).abs() <= est.final_diameter);
        assert_eq!(trace.entries.len(), est.sums_computed);
    }

    #[test]
    fn constant_converges_at_first_window() {
        let s = Space::euclidean(2);
        let f = constant_set(&s, CompactSet::polytope(vec![s.zero(), e1()]).unwrap()).unwrap();
        let sched = schedule(ScheduleKind::UniformDoubling, 6, &TagRule::Mid, 0).unwrap();
        let (est, _) = converge(&f, &sched, None, &ConvergeOptions::default()).unwrap();
        assert_eq!(est.verdict, Verdict::Converged);
        assert_eq!(est.sums_computed, 3);
    }

    #[test]
    fn short_schedule_exhausts_budget() {
        let s = Space::euclidean(1);
        let f = constant_set(&s, CompactSet::singleton(s.zero())).unwrap();
        let sched = schedule(ScheduleKind::UniformDoubling, 2, &TagRule::Mid, 0).unwrap();
        let (est, _) = converge(&f, &sched, None, &ConvergeOptions::default()).unwrap();
        assert_eq!(est.verdict, Verdict::BudgetExhausted);
    }

    #[test]
    fn biorthogonal_sums_are_not_cauchy() {
        let f = Biorthogonal::new();
        let sched = schedule(ScheduleKind::UniformDoubling, 4, &TagRule::Mid, 0).unwrap();
        let (est, trace) = converge(&f, &sched, None, &ConvergeOptions::default()).unwrap();
        assert_eq!(est.verdict, Verdict::NotCauchy);
        assert!(est.cauchy_tail.unwrap().lower >= 0.5);
        assert!(trace.entries[1..]
            .iter()
            .all(|e| e.distance_to_previous.unwrap().lower >= 0.5));
    }

    #[test]
    fn compare_conv_trivial_cases() {
        let s = Space::euclidean(2);
        let gamma = uniform_partition(8, &TagRule::Mid).unwrap();
        let single = linear_singleton(&s, e1()).unwrap();
        assert_eq!(
            compare_conv(&single, &gamma, 1.0, 2.0).unwrap().lhs.upper,
            0.0
        );
        let poly = constant_set(
            &s,
            CompactSet::polytope(vec![s.zero(), e1(), Vector::dense([0.0, 1.0])]).unwrap(),
        )
        .unwrap();
        assert!(compare_conv(&poly, &gamma, 1.0, 2.0).unwrap().lhs.upper < 1e-12);
    }

    #[test]
    fn compare_conv_two_piece_step() {
        // Step {0, e1} on [0,1/2), {0, e2} on [1/2,1] at n = 4: the sum is the
        // 3×3 grid of spacing 1/4 on [0,1/2]²; the worst hull point is a cell centre.
        let s = Space::euclidean(2);
        let half = Rational::new(1, 2);
        let f = step_multifunction(
            &s,
            vec![
                (
                    Rational::from_integer(0),
                    half,
                    CompactSet::cloud(vec![s.zero(), e1()]).unwrap(),
                ),
                (
                    half,
                    Rational::from_integer(1),
                    CompactSet::cloud(vec![s.zero(), Vector::dense([0.0, 1.0])]).unwrap(),
                ),
            ],
        )
        .unwrap();
        let r = compare_conv(&f, &uniform_partition(4, &TagRule::Mid).unwrap(), 1.0, 2.0).unwrap();
        assert!((r.lhs.upper - 0.125 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.sum_points, 9);
        // n = 2: only the corners of [0,1/2]², so the centre is the far point.
        let r2 = compare_conv(&f, &uniform_partition(2, &TagRule::Mid).unwrap(), 1.0, 2.0).unwrap();
        assert!((r2.lhs.upper - 0.25 * 2f64.sqrt()).abs() < 1e-12);
        assert!(r2.holds);
    }
}
