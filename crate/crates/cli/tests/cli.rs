//! End-to-end runs of the `setriemann` binary: the documented invocations,
//! exit codes, artifact files and the output directory variable.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_setriemann"));
    c.env_remove("SETRIEMANN_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn linear_singleton_converges() {
    let out = run(&[
        "converge",
        "--fn",
        "singleton:linear",
        "--schedule",
        "uniform-doubling",
        "--len",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["command"], "converge");
    assert_eq!(doc["result"]["estimate"]["verdict"], "converged");
    // Defaults are recorded alongside the explicit flags.
    assert_eq!(doc["config"]["window"], 3);
    assert_eq!(doc["config"]["schedule"]["tags"], "mid");
}

#[test]
fn empty_certificate_holds() {
    let out = run(&[
        "example",
        "empty",
        "--n-partition",
        "uniform:4",
        "--m-partition",
        "uniform:16",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert_eq!(r["holds"], true);
    assert_eq!(r["support_coarse"], "0");
    assert!(r["lower_bound_value"].as_f64().unwrap() >= 0.75);
}

/// The midpoint 1/2 is a tag of every odd prime partition and evaluates to
/// `{0}`, so only p = 2 reproduces `E[0,1]` and the command reports failure.
#[test]
fn l1_example_reports_each_prime() {
    let out = run(&["example", "l1", "--primes", "2,3,5,7,11", "--bins", "2310"]);
    assert_eq!(out.status.code(), Some(1));
    let r = &json(&out)["result"];
    assert_eq!(r["nonconvexity"]["witness_distance"], "1/2");
    let rows = r["primes"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["equals_e01"], true);
    for (row, p) in rows[1..].iter().zip([3, 5, 7, 11]) {
        assert_eq!(row["equals_e01"], false);
        assert_eq!(row["distance"], format!("1/{p}"));
    }
}

#[test]
fn hausdorff_of_cloud_and_polytope() {
    let out = run(&[
        "hausdorff",
        "--a",
        "cloud:0,0;1,0",
        "--b",
        "polytope:0,1;1,1;1/2,2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = &json(&out)["result"]["value"];
    let want = 17f64.sqrt() / 2.0;
    assert!((v["lower"].as_f64().unwrap() - want).abs() < 1e-12);
    assert!((v["upper"].as_f64().unwrap() - want).abs() < 1e-12);
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        vec!["converge", "--fn", "nope"],
        vec![
            "membership",
            "--fn",
            "singleton:indicator",
            "--target",
            "point:0,0",
        ],
        vec![
            "riemann-sum",
            "--fn",
            "constant",
            "--partition",
            "uniform:0",
        ],
        vec![
            "riemann-sum",
            "--fn",
            "constant",
            "--partition",
            "uniform:3",
            "--format",
            "csv",
        ],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unreached_target_exits_with_one_when_required() {
    let out = run(&[
        "membership",
        "--fn",
        "singleton:linear",
        "--target",
        "point:5,5",
        "--len",
        "3",
        "--seed",
        "1",
        "--require-reached",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["ok"], false);
}

#[test]
fn artifacts_land_in_the_env_directory() {
    let dir = scratch("env-out");
    let out = bin()
        .env("SETRIEMANN_OUT_DIR", &dir)
        .args(["converge", "--fn", "constant", "--len", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read(dir.join("converge.json")).unwrap();
    assert_eq!(written, out.stdout);
    let csv = std::fs::read_to_string(dir.join("converge.csv")).unwrap();
    assert!(csv.lines().count() > 1);
}

#[test]
fn flag_overrides_env_directory_and_name() {
    let env_dir = scratch("ignored-out");
    let dir = scratch("flag-out");
    let out = bin()
        .env("SETRIEMANN_OUT_DIR", &env_dir)
        .args(["example", "empty", "--out-dir"])
        .arg(&dir)
        .args(["--name", "cert"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.join("cert.json").exists());
    assert!(!env_dir.exists());
}

#[test]
fn seeded_commands_are_byte_identical() {
    for args in [
        vec![
            "converge",
            "--fn",
            "step:3x3",
            "--schedule",
            "random",
            "--len",
            "4",
            "--seed",
            "11",
        ],
        vec![
            "infratype",
            "--trials",
            "40",
            "--n-max",
            "8",
            "--seed",
            "11",
        ],
        vec![
            "embed",
            "--set",
            "cloud:0,0;1,0;0,1",
            "--directions",
            "16",
            "--seed",
            "11",
            "--format",
            "csv",
        ],
    ] {
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn csv_columns_for_membership() {
    let out = run(&[
        "membership",
        "--fn",
        "singleton:indicator",
        "--target",
        "point:1/2,0",
        "--len",
        "4",
        "--seed",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
}
