//! `selftest`: the property suites, the Hilbert/ℓ1 infratype checks, and a
//! byte-level rerun of a fixed set of commands.

use clap::Args;
use serde::Serialize;
use serde_json::json;
use setriemann::checks::{l1_pair_ratio, property_suites, shevchenko_bound};
use setriemann::error::{Error, Result};
use sha2::{Digest, Sha256};

use crate::commands::Outcome;
use crate::run_args;

#[derive(Args, Serialize, Clone, Debug)]
pub struct SelftestArgs {
    /// Seeds every suite and every rerun command.
    #[arg(long)]
    pub seed: u64,
    /// Instances per property suite.
    #[arg(long, default_value_t = 1000)]
    pub instances: usize,
    /// Random step multifunctions for the conv comparison.
    #[arg(long, default_value_t = 100)]
    pub multifunctions: usize,
}

#[derive(Serialize)]
struct RerunCheck {
    command: String,
    sha256: String,
    identical: bool,
    ok: bool,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// One representative invocation per subcommand.
fn rerun_commands(seed: u64) -> Vec<Vec<String>> {
    let s = seed.to_string();
    let raw: Vec<Vec<&str>> = vec![
        vec![
            "hausdorff",
            "--a",
            "cloud:0,0;1,0",
            "--b",
            "polytope:0,1;1,1;1/2,2",
        ],
        vec!["minkowski", "--a", "cloud:0,0;1,0", "--b", "cloud:0,0;0,1"],
        vec![
            "riemann-sum",
            "--fn",
            "constant:cloud:0,0;1,0",
            "--partition",
            "uniform:5",
        ],
        vec![
            "riemann-sum",
            "--fn",
            "l1",
            "--bins",
            "30",
            "--partition",
            "prime:3",
        ],
        vec!["converge", "--fn", "singleton:linear", "--len", "6"],
        vec![
            "converge",
            "--fn",
            "step:2x2",
            "--schedule",
            "random",
            "--len",
            "4",
            "--seed",
            &s,
        ],
        vec![
            "compare-conv",
            "--fn",
            "step",
            "--sizes",
            "4,16,64",
            "--seed",
            &s,
        ],
        vec![
            "membership",
            "--fn",
            "singleton:indicator",
            "--target",
            "point:1/2,0",
            "--len",
            "4",
            "--seed",
            &s,
        ],
        vec![
            "convex-probe",
            "--fn",
            "singleton:indicator",
            "--a",
            "point:0,0",
            "--b",
            "point:1,0",
            "--len",
            "3",
            "--seed",
            &s,
        ],
        vec![
            "star-probe",
            "--fn",
            "singleton:indicator",
            "--center",
            "point:1/2,0",
            "--candidate",
            "point:1,0",
            "--lambdas",
            "0,1/2,1",
            "--len",
            "3",
            "--seed",
            &s,
        ],
        vec!["example", "l1", "--primes", "2,3,5", "--bins", "30"],
        vec!["example", "empty"],
        vec!["infratype", "--trials", "50", "--n-max", "10", "--seed", &s],
        vec![
            "embed",
            "--set",
            "cloud:0,0;1,0;0,1",
            "--other",
            "point:1,1",
            "--directions",
            "32",
            "--seed",
            &s,
        ],
    ];
    raw.into_iter()
        .map(|args| {
            std::iter::once("setriemann")
                .chain(args)
                .map(String::from)
                .collect()
        })
        .collect()
}

fn rerun(argv: &[String]) -> Result<RerunCheck> {
    let first = run_args(argv).map_err(Error::InvalidArgument)?;
    let second = run_args(argv).map_err(Error::InvalidArgument)?;
    let bytes = |a: &crate::Artifacts| {
        let mut b = a.json.clone().into_bytes();
        b.extend(a.csv.as_deref().unwrap_or_default().as_bytes());
        b
    };
    let (h1, h2) = (sha256_hex(&bytes(&first)), sha256_hex(&bytes(&second)));
    Ok(RerunCheck {
        command: argv[1..].join(" "),
        identical: h1 == h2,
        sha256: h1,
        ok: first.ok,
    })
}

pub fn run(args: &SelftestArgs) -> Result<Outcome> {
    let mut suites = property_suites(args.instances, args.seed)?;
    suites.push(shevchenko_bound(args.multifunctions, args.seed)?);
    let ratio = l1_pair_ratio()?;
    let ratio_ok = (ratio - 2f64.sqrt()).abs() <= 1e-12;
    let reruns = rerun_commands(args.seed)
        .iter()
        .map(|argv| rerun(argv))
        .collect::<Result<Vec<_>>>()?;
    let ok = suites.iter().all(|s| s.passed) && ratio_ok && reruns.iter().all(|r| r.identical);
    let mut csv = String::from("suite,instances,violations,worst,passed\n");
    for s in &suites {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            s.name, s.instances, s.violations, s.worst, s.passed
        ));
    }
    Ok(Outcome {
        result: json!({
            "suites": suites,
            "l1_pair_ratio": { "value": ratio, "expected": 2f64.sqrt(), "passed": ratio_ok },
            "determinism": reruns,
        }),
        csv: Some(csv),
        ok,
    })
}
