//! Acceptance run: one PASS/FAIL line per criterion, each checked at its
//! stated tolerance and runtime budget.
//!
//! Criterion 1 asks for exact equality S(F, Γ_p, T_p) = E[0,1] for every
//! prime in {2,3,5,7,11}. For odd p the middle tag of Γ_p is 1/2, which the
//! L1 multifunction sends to {0}, so the sum misses E[0,1] by exactly 1/p.
//! That criterion is reported as FAIL with the measured distances. The run
//! exits non-zero when the set of failing criteria differs from
//! [`KNOWN_FAILURES`], so a regression elsewhere or an unexpected pass both
//! surface.

use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;
use setriemann::checks::{
    hilbert_infratype, l1_pair_ratio, property_suites, shevchenko_bound, SuiteOutcome,
};
use setriemann::multifn::{Biorthogonal, Multifunction};
use setriemann::partition::{uniform_partition, TagRule};
use setriemann::real::Rational;
use setriemann::riemann::{empty_example_verifier, sum_support};
use sha2::{Digest, Sha256};

const SEED: u64 = 20_240_601;
const KNOWN_FAILURES: &[u32] = &[1];

struct Verdict {
    passed: bool,
    detail: String,
}

fn run_json(args: &[&str]) -> (Option<i32>, Value, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_setriemann"))
        .env_remove("SETRIEMANN_OUT_DIR")
        .args(args)
        .output()
        .expect("binary runs");
    let doc = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code(), doc, out.stdout)
}

fn within(elapsed: Duration, budget_s: f64) -> bool {
    elapsed.as_secs_f64() < budget_s
}

fn suites_line(suites: &[SuiteOutcome]) -> String {
    suites
        .iter()
        .map(|s| {
            format!(
                "{} {}/{} worst {:.2e}",
                s.name, s.violations, s.instances, s.worst
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn l1_exactness() -> Verdict {
    let start = Instant::now();
    let (_, doc, _) = run_json(&["example", "l1", "--primes", "2,3,5,7,11", "--bins", "2310"]);
    let elapsed = start.elapsed();
    let r = &doc["result"];
    let rows = r["primes"].as_array().cloned().unwrap_or_default();
    let all_equal = rows.len() == 5 && rows.iter().all(|row| row["equals_e01"] == true);
    let witness = r["nonconvexity"]["witness_distance"] == "1/2";
    let distances = rows
        .iter()
        .map(|row| {
            format!(
                "p={} d_H={}",
                row["p"],
                row["distance"].as_str().unwrap_or("?")
            )
        })
        .collect::<Vec<_>>()
        .join(", ");
    Verdict {
        passed: all_equal && witness && within(elapsed, 1.0),
        detail: format!(
            "{distances}; witness 1/2: {witness}; {:.3}s",
            elapsed.as_secs_f64()
        ),
    }
}

fn empty_certificate() -> Verdict {
    let start = Instant::now();
    let f = Biorthogonal::new();
    let mut worst = Rational::from_integer(1);
    let mut ok = true;
    for k in 2u64..=8 {
        let coarse = uniform_partition(k, &TagRule::Mid).unwrap();
        for m in [4 * k, 8 * k] {
            let fine = uniform_partition(m, &TagRule::Mid).unwrap();
            let cert = empty_example_verifier(&coarse, &fine).unwrap();
            let bound = Rational::from_integer(1) - Rational::new(k as i64, m as i64);
            let lower: Rational = cert
                .lower_bound
                .parse::<setriemann::real::Real>()
                .unwrap()
                .require_exact()
                .unwrap();
            let g = f.witness_functionals(&coarse, &fine).unwrap();
            let at_coarse = sum_support(&f, &coarse, &g[0]).unwrap();
            ok &= cert.holds && cert.support_coarse == "0" && at_coarse == 0.0;
            ok &= lower >= bound && bound > Rational::new(1, 2);
            worst = worst.min(lower);
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        passed: ok && within(elapsed, 1.0),
        detail: format!(
            "k=2..8, smallest lower bound {worst}; {:.3}s",
            elapsed.as_secs_f64()
        ),
    }
}

fn shevchenko() -> Verdict {
    let start = Instant::now();
    let s = shevchenko_bound(100, SEED).unwrap();
    let elapsed = start.elapsed();
    Verdict {
        passed: s.passed && s.violations == 0 && within(elapsed, 60.0),
        detail: format!("{}; {:.1}s", suites_line(&[s]), elapsed.as_secs_f64()),
    }
}

fn property_suites_1000() -> Verdict {
    let start = Instant::now();
    let suites = property_suites(1000, SEED).unwrap();
    let elapsed = start.elapsed();
    let core: Vec<SuiteOutcome> = suites
        .into_iter()
        .filter(|s| s.name != "hilbert-infratype")
        .collect();
    Verdict {
        passed: core.iter().all(|s| s.passed) && within(elapsed, 60.0),
        detail: format!("{}; {:.1}s", suites_line(&core), elapsed.as_secs_f64()),
    }
}

fn hilbert() -> Verdict {
    let start = Instant::now();
    let s = hilbert_infratype(1000, SEED).unwrap();
    let ratio = l1_pair_ratio().unwrap();
    let elapsed = start.elapsed();
    let ratio_ok = (ratio - 2f64.sqrt()).abs() <= 1e-12;
    Verdict {
        passed: s.passed && ratio_ok && within(elapsed, 30.0),
        detail: format!(
            "{}; l1 ratio {ratio}; {:.1}s",
            suites_line(&[s]),
            elapsed.as_secs_f64()
        ),
    }
}

fn integrable_baselines() -> Verdict {
    let start = Instant::now();
    let (code, lin, _) = run_json(&["converge", "--fn", "singleton:linear", "--len", "10"]);
    let est = &lin["result"]["estimate"];
    let p = &est["candidate"]["points"][0];
    let (x, y) = (
        p[0].as_f64().unwrap_or(f64::NAN),
        p[1].as_f64().unwrap_or(f64::NAN),
    );
    let gap = ((x - 0.5).powi(2) + y * y).sqrt();
    let d_final = est["final_diameter"].as_f64().unwrap_or(0.0);
    let linear_ok = code == Some(0) && est["verdict"] == "converged" && gap <= d_final;

    let mut constants_ok = true;
    // A constant non-convex K sums to (1/n)(K+…+K), which only tends to
    // conv K; the one-window claim is for convex values.
    for set in [
        "constant",
        "constant:point:1/3,2",
        "constant:polytope:0,0;1,0;0,1",
        "constant:polytope:-1,-1;1,-1;1,1;-1,1",
    ] {
        let (code, doc, _) = run_json(&["converge", "--fn", set, "--len", "6"]);
        let est = &doc["result"]["estimate"];
        constants_ok &= code == Some(0)
            && est["verdict"] == "converged"
            && est["sums_computed"] == doc["config"]["window"];
    }
    let elapsed = start.elapsed();
    Verdict {
        passed: linear_ok && constants_ok && within(elapsed, 5.0),
        detail: format!(
            "t·e1 gap {gap:.2e} vs d(Γ_final) {d_final}; constants in one window: {constants_ok}; {:.2}s",
            elapsed.as_secs_f64()
        ),
    }
}

fn structure_probes() -> Verdict {
    let start = Instant::now();
    let seed = SEED.to_string();
    let mut ok = true;
    let mut notes = Vec::new();
    for target in ["point:0,0", "point:1,0", "point:1/2,0"] {
        let (code, doc, _) = run_json(&[
            "membership",
            "--fn",
            "singleton:indicator",
            "--target",
            target,
            "--len",
            "8",
            "--seed",
            &seed,
            "--require-reached",
        ]);
        let steps = doc["result"]["steps"]
            .as_array()
            .cloned()
            .unwrap_or_default();
        let every_step = !steps.is_empty()
            && steps.iter().all(|s| {
                let (d, eps) = (
                    s["distance"].as_f64().unwrap_or(f64::NAN),
                    s["diameter"].as_f64().unwrap_or(0.0),
                );
                d <= 2.0 * eps
            });
        ok &= code == Some(0) && doc["result"]["reached"] == true && every_step;
        notes.push(format!("{target} reached: {every_step}"));
    }
    let elapsed = start.elapsed();
    Verdict {
        passed: ok && within(elapsed, 30.0),
        detail: format!("{}; {:.2}s", notes.join(", "), elapsed.as_secs_f64()),
    }
}

fn determinism() -> Verdict {
    let seed = SEED.to_string();
    let args = [
        "selftest",
        "--seed",
        &seed,
        "--instances",
        "100",
        "--multifunctions",
        "10",
    ];
    let (c1, doc, first) = run_json(&args);
    let (c2, _, second) = run_json(&args);
    let hash = |b: &[u8]| {
        Sha256::digest(b)
            .iter()
            .map(|x| format!("{x:02x}"))
            .collect::<String>()
    };
    let (h1, h2) = (hash(&first), hash(&second));
    let reruns = doc["result"]["determinism"]
        .as_array()
        .cloned()
        .unwrap_or_default();
    let internal = !reruns.is_empty() && reruns.iter().all(|r| r["identical"] == true);
    Verdict {
        passed: c1 == Some(0) && c2 == Some(0) && h1 == h2 && internal,
        detail: format!(
            "{} commands rehashed identically: {internal}; selftest sha256 {}",
            reruns.len(),
            &h1[..16]
        ),
    }
}

type Criterion = (u32, &'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "L1 example exactness", l1_exactness),
        (2, "empty certificate", empty_certificate),
        (3, "Shevchenko bound", shevchenko),
        (4, "property suites", property_suites_1000),
        (5, "Hilbert infratype", hilbert),
        (6, "integrable baselines", integrable_baselines),
        (7, "structure probes", structure_probes),
        (8, "determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        let v = check();
        let status = if v.passed { "PASS" } else { "FAIL" };
        println!("criterion {id} {status} {name}: {}", v.detail);
        if !v.passed {
            failed.push(id);
        }
    }
    if failed != KNOWN_FAILURES {
        println!("acceptance: failing criteria {failed:?}, expected exactly {KNOWN_FAILURES:?}");
        std::process::exit(1);
    }
    println!("acceptance: failing criteria {failed:?} match the recorded analysis");
}
