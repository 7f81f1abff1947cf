//! One function per subcommand. Each returns the JSON result, optional CSV
//! plot columns, and whether the command's assertions held.

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use setriemann::error::{Error, Result};
use setriemann::infratype::{
    estimate_constant, min_sign_norm, shevchenko_constant, EXACT_THRESHOLD,
};
use setriemann::multifn::{L1Example, Multifunction, SharedMultifunction};
use setriemann::partition::{schedule, ScheduleKind, TagRule, TaggedPartition};
use setriemann::radstrom::{distance_curve, embed, planar_support_distance, sample_distance};
use setriemann::real::{format_rational, rational_to_f64, Rational};
use setriemann::riemann::{
    compare_conv, converge, convex_combination_probe, empty_example_verifier, membership_probe,
    riemann_sum, star_probe, ConvergeOptions, ProbeOptions, Verdict,
};
use setriemann::sets::{
    hausdorff_report, is_convex_within, minkowski_sum, set_norm, CompactSet, ESum, GapOptions,
};
use setriemann::space::{circle_directions, Space};

use crate::specs::{
    parse_multifunction, parse_partition, parse_real, parse_reals, parse_set, parse_u64s, space_for,
};

pub struct Outcome {
    pub result: Value,
    pub csv: Option<String>,
    pub ok: bool,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome {
            result,
            csv: None,
            ok: true,
        }
    }
}

fn to_json(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| Error::InvalidArgument(format!("{what} is randomized and needs --seed")))
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct SpaceArgs {
    /// Normed space: l2:2, l1:3, linf:2, l3/2:4, grid:M (L1 bins) or sparse.
    #[arg(long, default_value = "l2:2")]
    pub space: String,
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct FnArgs {
    /// Multifunction: constant[:SET], singleton:linear|poly|indicator[:…], step[:PxK], l1, biorth, conv:FN.
    #[arg(long = "fn")]
    pub function: String,
    /// Space for multifunctions that do not fix their own.
    #[arg(long, default_value = "l2:2")]
    pub space: String,
    /// Bins of the L1 grid used by `l1`.
    #[arg(long, default_value_t = 2310)]
    pub bins: u64,
}

impl FnArgs {
    fn build(&self, seed: Option<u64>) -> Result<SharedMultifunction> {
        let space = space_for(&self.function, &self.space, self.bins)?;
        parse_multifunction(&self.function, &space, self.bins, seed)
    }
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleName {
    UniformDoubling,
    Primes,
    Random,
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct ScheduleArgs {
    #[arg(long, value_enum, default_value = "uniform-doubling")]
    pub schedule: ScheduleName,
    /// Number of partitions.
    #[arg(long, default_value_t = 6)]
    pub len: usize,
    /// Tag rule for uniform partitions: left, right or mid.
    #[arg(long, default_value = "mid")]
    pub tags: String,
}

impl ScheduleArgs {
    fn build(&self, seed: Option<u64>) -> Result<Vec<TaggedPartition>> {
        let kind = match self.schedule {
            ScheduleName::UniformDoubling => ScheduleKind::UniformDoubling,
            ScheduleName::Primes => ScheduleKind::Primes,
            ScheduleName::Random => ScheduleKind::Random,
        };
        let seed = match kind {
            ScheduleKind::Random => require_seed(seed, "the random schedule")?,
            _ => seed.unwrap_or(0),
        };
        let rule: TagRule = self.tags.parse()?;
        schedule(kind, self.len, &rule, seed)
    }
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct PairArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// First set: cloud:x,y;…, polytope:…, point:x,y, esum:w@lo..hi;…, JSON or @file.
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
}

pub fn hausdorff(args: &PairArgs) -> Result<Outcome> {
    let space: Space = args.space.space.parse()?;
    let (a, b) = (parse_set(&args.a, &space)?, parse_set(&args.b, &space)?);
    let report = hausdorff_report(&space, &a, &b, &GapOptions::default())?;
    let exact = match (a.as_esum(), b.as_esum()) {
        (Some(x), Some(y)) => Some(format_rational(x.hausdorff(y)?)),
        _ => None,
    };
    Ok(Outcome::ok(json!({
        "value": report.value,
        "method": report.method,
        "exact": exact,
    })))
}

pub fn minkowski(args: &PairArgs) -> Result<Outcome> {
    let space: Space = args.space.space.parse()?;
    let sum = minkowski_sum(
        &space,
        &parse_set(&args.a, &space)?,
        &parse_set(&args.b, &space)?,
    )?;
    Ok(Outcome::ok(json!({ "size": sum.len(), "sum": sum })))
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct RiemannSumArgs {
    #[command(flatten)]
    pub function: FnArgs,
    /// Partition: uniform:N[:rule], prime:p, random:MAXD, JSON or @file.
    #[arg(long)]
    pub partition: String,
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn riemann_sum_cmd(args: &RiemannSumArgs) -> Result<Outcome> {
    let f = args.function.build(args.seed)?;
    let gamma = parse_partition(&args.partition, args.seed)?;
    let sum = riemann_sum(f.as_ref(), &gamma)?;
    Ok(Outcome::ok(json!({
        "intervals": gamma.len(),
        "diameter": format_rational(gamma.diameter()),
        "size": sum.len(),
        "norm": set_norm(f.space(), &sum)?,
        "display": sum.as_esum().map(ESum::to_string),
        "sum": sum,
    })))
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictName {
    Converged,
    NotCauchy,
    BudgetExhausted,
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub function: FnArgs,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// Sums compared pairwise in the Cauchy test.
    #[arg(long, default_value_t = 3)]
    pub window: usize,
    /// Optional limit to report distances against.
    #[arg(long)]
    pub target: Option<String>,
    /// Exit 1 unless the verdict matches.
    #[arg(long, value_enum)]
    pub expect: Option<VerdictName>,
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn converge_cmd(args: &ConvergeArgs) -> Result<Outcome> {
    let f = args.function.build(args.seed)?;
    let sched = args.schedule.build(args.seed)?;
    let target = args
        .target
        .as_deref()
        .map(|t| parse_set(t, f.space()))
        .transpose()?;
    let opts = ConvergeOptions {
        tolerance: args.tolerance,
        window: args.window,
    };
    let (estimate, trace) = converge(f.as_ref(), &sched, target.as_ref(), &opts)?;
    let verdict = match estimate.verdict {
        Verdict::Converged => VerdictName::Converged,
        Verdict::NotCauchy => VerdictName::NotCauchy,
        Verdict::BudgetExhausted => VerdictName::BudgetExhausted,
    };
    Ok(Outcome {
        csv: Some(trace.to_csv()),
        ok: args.expect.is_none_or(|e| e == verdict),
        result: json!({ "estimate": estimate, "trace": trace }),
    })
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct CompareConvArgs {
    #[command(flatten)]
    pub function: FnArgs,
    /// Uniform partition sizes (midpoint tags).
    #[arg(long, default_value = "4,8,16,32,64,128,256")]
    pub sizes: String,
    /// Infratype constant C.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Infratype exponent p.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn compare_conv_cmd(args: &CompareConvArgs) -> Result<Outcome> {
    let f = args.function.build(args.seed)?;
    let mut rows = Vec::new();
    let mut csv = String::from("n,diameter,lhs_lower,lhs_upper,rhs\n");
    let mut ok = true;
    for n in parse_u64s(&args.sizes)? {
        let gamma = parse_partition(&format!("uniform:{n}"), None)?;
        let r = compare_conv(f.as_ref(), &gamma, args.c, args.p)?;
        csv.push_str(&format!(
            "{n},{},{},{},{}\n",
            r.diameter, r.lhs.lower, r.lhs.upper, r.rhs
        ));
        ok &= r.holds;
        rows.push(json!({ "n": n, "report": r }));
    }
    Ok(Outcome {
        result: json!({
            "shevchenko_constant": shevchenko_constant(args.c, args.p)?,
            "rows": rows,
        }),
        csv: Some(csv),
        ok,
    })
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub function: FnArgs,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// Coordinate-descent passes per partition.
    #[arg(long, default_value_t = 4)]
    pub sweeps: usize,
    /// A step is reached when its distance is at most slack · d(Γ).
    #[arg(long, default_value_t = 2.0)]
    pub slack: f64,
    /// Seeds the generic tag of every pool.
    #[arg(long)]
    pub seed: u64,
    /// Exit 1 when the target is not reached.
    #[arg(long)]
    pub require_reached: bool,
}

impl ProbeArgs {
    fn setup(&self) -> Result<(SharedMultifunction, Vec<TaggedPartition>, ProbeOptions)> {
        let f = self.function.build(Some(self.seed))?;
        let sched = self.schedule.build(Some(self.seed))?;
        let opts = ProbeOptions {
            sweeps: self.sweeps,
            slack: self.slack,
            seed: self.seed,
        };
        Ok((f, sched, opts))
    }
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct MembershipArgs {
    #[command(flatten)]
    pub probe: ProbeArgs,
    #[arg(long)]
    pub target: String,
}

pub fn membership(args: &MembershipArgs) -> Result<Outcome> {
    let (f, sched, opts) = args.probe.setup()?;
    let target = parse_set(&args.target, f.space())?;
    let r = membership_probe(f.as_ref(), &target, &sched, &opts)?;
    Ok(Outcome {
        csv: Some(r.to_csv()),
        ok: r.reached || !args.probe.require_reached,
        result: to_json(r),
    })
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct ConvexProbeArgs {
    #[command(flatten)]
    pub probe: ProbeArgs,
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    /// Probes λA + (1−λ)B.
    #[arg(long, default_value = "1/2")]
    pub lambda: String,
}

pub fn convex_probe(args: &ConvexProbeArgs) -> Result<Outcome> {
    let (f, sched, opts) = args.probe.setup()?;
    let (a, b) = (
        parse_set(&args.a, f.space())?,
        parse_set(&args.b, f.space())?,
    );
    let r = convex_combination_probe(
        f.as_ref(),
        &a,
        &b,
        &parse_real(&args.lambda)?,
        &sched,
        &opts,
    )?;
    Ok(Outcome {
        csv: Some(r.probe.to_csv()),
        ok: r.probe.reached || !args.probe.require_reached,
        result: to_json(r),
    })
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct StarProbeArgs {
    #[command(flatten)]
    pub probe: ProbeArgs,
    #[arg(long)]
    pub center: String,
    /// Repeatable.
    #[arg(long = "candidate", required = true)]
    pub candidates: Vec<String>,
    #[arg(long, default_value = "0,1/4,1/2,3/4,1")]
    pub lambdas: String,
}

pub fn star(args: &StarProbeArgs) -> Result<Outcome> {
    let (f, sched, opts) = args.probe.setup()?;
    let center = parse_set(&args.center, f.space())?;
    let candidates = args
        .candidates
        .iter()
        .map(|c| parse_set(c, f.space()))
        .collect::<Result<Vec<_>>>()?;
    let r = star_probe(
        f.as_ref(),
        &center,
        &candidates,
        &parse_reals(&args.lambdas)?,
        &sched,
        &opts,
    )?;
    let mut csv = String::from("candidate,lambda,intervals,distance\n");
    for (i, ray) in r.rays.iter().enumerate() {
        for c in ray {
            for s in &c.probe.steps {
                csv.push_str(&format!(
                    "{i},{},{},{}\n",
                    c.lambda, s.intervals, s.distance
                ));
            }
        }
    }
    Ok(Outcome {
        csv: Some(csv),
        ok: r.all_reached || !args.probe.require_reached,
        result: to_json(r),
    })
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct L1Args {
    #[arg(long, default_value = "2,3,5,7,11")]
    pub primes: String,
    /// Must be divisible by 2p for every prime p.
    #[arg(long, default_value_t = 2310)]
    pub bins: u64,
}

pub fn example_l1(args: &L1Args) -> Result<Outcome> {
    let primes = parse_u64s(&args.primes)?;
    let f = L1Example::new(args.bins)?;
    f.check_primes(&primes)?;
    let one = Rational::from_integer(1);
    let full = ESum::single(args.bins, one, Rational::from_integer(0), one)?;
    let mut rows = Vec::new();
    let mut csv = String::from("p,equal,distance\n");
    let mut ok = true;
    for &p in &primes {
        let gamma = parse_partition(&format!("prime:{p}"), None)?;
        let sum = riemann_sum(&f, &gamma)?;
        let e = sum
            .as_esum()
            .ok_or_else(|| Error::Unsupported("the L1 example should sum to an E-set".into()))?;
        let equal = *e == full;
        let d = e.hausdorff(&full)?;
        ok &= equal;
        csv.push_str(&format!("{p},{equal},{}\n", format_rational(d)));
        rows.push(json!({
            "p": p,
            "intervals": gamma.len(),
            "sum": e.normalized().to_string(),
            "equals_e01": equal,
            "distance": format_rational(d),
            "distance_value": rational_to_f64(d),
        }));
    }
    let check = is_convex_within(f.space(), &CompactSet::esum(full), 0.25)?;
    let witness = check
        .witness
        .as_ref()
        .and_then(|w| w.exact_distance.clone());
    ok &= !check.convex && witness.as_deref() == Some("1/2");
    Ok(Outcome {
        result: json!({
            "target": "E[0,1]",
            "primes": rows,
            "nonconvexity": {
                "convex": check.convex,
                "witness_distance": witness,
            },
        }),
        csv: Some(csv),
        ok,
    })
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct EmptyArgs {
    /// Coarse partition Γ_n.
    #[arg(long, default_value = "uniform:4")]
    pub n_partition: String,
    /// Fine partition Γ_m, with d(Γ_m) < 1/(2|T_n|).
    #[arg(long, default_value = "uniform:16")]
    pub m_partition: String,
}

pub fn example_empty(args: &EmptyArgs) -> Result<Outcome> {
    let n = parse_partition(&args.n_partition, None)?;
    let m = parse_partition(&args.m_partition, None)?;
    let cert = empty_example_verifier(&n, &m)?;
    Ok(Outcome {
        ok: cert.holds,
        result: to_json(cert),
        csv: None,
    })
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct InfratypeArgs {
    #[arg(long, default_value = "l2:3")]
    pub space: String,
    /// Infratype exponent.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 16)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Exit 1 if the estimate exceeds this constant.
    #[arg(long)]
    pub c: Option<f64>,
    /// A fixed collection x,y;x,y;… instead of random trials.
    #[arg(long)]
    pub vectors: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn infratype(args: &InfratypeArgs) -> Result<Outcome> {
    let space: Space = args.space.parse()?;
    if let Some(v) = &args.vectors {
        let xs = crate::specs::parse_points(v)?;
        let m = min_sign_norm(&space, &xs, EXACT_THRESHOLD)?;
        let mut denom = 0.0;
        for x in &xs {
            denom += space.norm(x)?.powf(args.p);
        }
        let ratio = m.norm / denom.powf(1.0 / args.p);
        return Ok(Outcome {
            ok: args.c.is_none_or(|c| ratio <= c + 1e-12),
            result: json!({ "min_sign_norm": m.norm, "signs": m.signs, "ratio": ratio }),
            csv: None,
        });
    }
    let seed = require_seed(args.seed, "infratype estimation")?;
    let est = estimate_constant(&space, args.p, args.n_max, args.trials, seed)?;
    Ok(Outcome {
        ok: args.c.is_none_or(|c| est.c_hat <= c + 1e-12),
        csv: Some(est.to_csv()),
        result: json!({
            "estimate": est,
            "shevchenko_constant_at_c_hat": shevchenko_constant(est.c_hat, args.p)?,
        }),
    })
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long)]
    pub set: String,
    /// Second set: also report the support distance between the two.
    #[arg(long)]
    pub other: Option<String>,
    /// Number of directions.
    #[arg(long, default_value_t = 64)]
    pub directions: usize,
    /// Equispaced directions on the Euclidean circle instead of seeded samples.
    #[arg(long)]
    pub circle: bool,
    /// Direction counts for a distance curve against --other.
    #[arg(long)]
    pub curve: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn embed_cmd(args: &EmbedArgs) -> Result<Outcome> {
    let space: Space = args.space.space.parse()?;
    let planar = space.is_euclidean() && space.dimension() == Some(2);
    let dirs = if args.circle {
        if !planar {
            return Err(Error::InvalidArgument(
                "--circle needs the space l2:2".into(),
            ));
        }
        circle_directions(args.directions)
    } else {
        space.sample_directions(
            args.directions,
            require_seed(args.seed, "direction sampling")?,
        )?
    };
    let a = parse_set(&args.set, &space)?;
    let sample = embed(&space, &a, &dirs)?;
    let mut result = json!({ "sample": sample });
    if let Some(o) = &args.other {
        let b = parse_set(o, &space)?;
        result["sample_distance"] = json!(sample_distance(&sample, &embed(&space, &b, &dirs)?)?);
        if planar && a.as_esum().is_none() && b.as_esum().is_none() {
            result["exact_distance"] = json!(planar_support_distance(&space, &a, &b)?);
        }
        if let Some(c) = &args.curve {
            let counts: Vec<usize> = parse_u64s(c)?.into_iter().map(|x| x as usize).collect();
            let seed = if planar {
                0
            } else {
                require_seed(args.seed, "direction sampling")?
            };
            result["curve"] = to_json(distance_curve(&space, &a, &b, &counts, seed)?);
        }
    }
    Ok(Outcome {
        csv: sample.to_csv().ok(),
        result,
        ok: true,
    })
}
