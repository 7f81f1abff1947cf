//! `setriemann`: reproducible experiments on Riemann sums of multifunctions.
//!
//! Every command prints a JSON envelope on stdout (or the CSV plot columns
//! with `--format csv`) and, when an output directory is configured, also
//! writes `<name>.json` and `<name>.csv` there. Exit status: 0 when the
//! command's assertions hold, 1 when one fails, 2 on a configuration error.

mod commands;
mod selftest;
mod specs;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use commands::{
    CompareConvArgs, ConvergeArgs, ConvexProbeArgs, EmbedArgs, EmptyArgs, InfratypeArgs, L1Args,
    MembershipArgs, Outcome, PairArgs, RiemannSumArgs, StarProbeArgs,
};
use selftest::SelftestArgs;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "SETRIEMANN_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "setriemann",
    version,
    about = "Riemann sums of set-valued maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for JSON/CSV artifacts.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    out_dir: Option<PathBuf>,
    /// What to print on stdout.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// File stem for artifacts; defaults to the command name.
    #[arg(long, global = true)]
    name: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hausdorff distance between two sets.
    Hausdorff(PairArgs),
    /// Minkowski sum of two sets.
    Minkowski(PairArgs),
    /// One Riemann sum S(F, Γ, T).
    RiemannSum(RiemannSumArgs),
    /// Cauchy test of Riemann sums along a schedule.
    Converge(ConvergeArgs),
    /// d_H(S(F), S(conv F)) against the infratype bound.
    CompareConv(CompareConvArgs),
    /// Greedy tag search towards a target set.
    Membership(MembershipArgs),
    /// Membership probe of λA + (1−λ)B.
    ConvexProbe(ConvexProbeArgs),
    /// Membership probes along segments to a centre.
    StarProbe(StarProbeArgs),
    /// The worked examples.
    #[command(subcommand)]
    Example(Example),
    /// Sign minimization and infratype constants.
    Infratype(InfratypeArgs),
    /// Sampled support-function embedding.
    Embed(EmbedArgs),
    /// Every property suite plus a determinism check.
    Selftest(SelftestArgs),
}

#[derive(Subcommand, Debug)]
enum Example {
    /// Sums of the L1 example on prime partitions against E[0,1].
    L1(L1Args),
    /// Certificate that the biorthogonal multifunction has no Cauchy sums.
    Empty(EmptyArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Hausdorff(_) => "hausdorff",
            Command::Minkowski(_) => "minkowski",
            Command::RiemannSum(_) => "riemann-sum",
            Command::Converge(_) => "converge",
            Command::CompareConv(_) => "compare-conv",
            Command::Membership(_) => "membership",
            Command::ConvexProbe(_) => "convex-probe",
            Command::StarProbe(_) => "star-probe",
            Command::Example(Example::L1(_)) => "example-l1",
            Command::Example(Example::Empty(_)) => "example-empty",
            Command::Infratype(_) => "infratype",
            Command::Embed(_) => "embed",
            Command::Selftest(_) => "selftest",
        }
    }

    /// The arguments as recorded in the envelope, defaults included.
    fn config(&self) -> Value {
        let v = match self {
            Command::Hausdorff(a) | Command::Minkowski(a) => serde_json::to_value(a),
            Command::RiemannSum(a) => serde_json::to_value(a),
            Command::Converge(a) => serde_json::to_value(a),
            Command::CompareConv(a) => serde_json::to_value(a),
            Command::Membership(a) => serde_json::to_value(a),
            Command::ConvexProbe(a) => serde_json::to_value(a),
            Command::StarProbe(a) => serde_json::to_value(a),
            Command::Example(Example::L1(a)) => serde_json::to_value(a),
            Command::Example(Example::Empty(a)) => serde_json::to_value(a),
            Command::Infratype(a) => serde_json::to_value(a),
            Command::Embed(a) => serde_json::to_value(a),
            Command::Selftest(a) => serde_json::to_value(a),
        };
        v.expect("arguments serialize")
    }

    fn run(&self) -> setriemann::error::Result<Outcome> {
        match self {
            Command::Hausdorff(a) => commands::hausdorff(a),
            Command::Minkowski(a) => commands::minkowski(a),
            Command::RiemannSum(a) => commands::riemann_sum_cmd(a),
            Command::Converge(a) => commands::converge_cmd(a),
            Command::CompareConv(a) => commands::compare_conv_cmd(a),
            Command::Membership(a) => commands::membership(a),
            Command::ConvexProbe(a) => commands::convex_probe(a),
            Command::StarProbe(a) => commands::star(a),
            Command::Example(Example::L1(a)) => commands::example_l1(a),
            Command::Example(Example::Empty(a)) => commands::example_empty(a),
            Command::Infratype(a) => commands::infratype(a),
            Command::Embed(a) => commands::embed_cmd(a),
            Command::Selftest(a) => selftest::run(a),
        }
    }
}

/// The bytes a command prints: the JSON envelope and the CSV columns.
pub struct Artifacts {
    pub json: String,
    pub csv: Option<String>,
    pub ok: bool,
}

fn envelope(command: &Command, outcome: Outcome) -> Artifacts {
    let doc = json!({
        "tool": "setriemann",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command.name(),
        "config": command.config(),
        "ok": outcome.ok,
        "result": outcome.result,
    });
    Artifacts {
        json: serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n",
        csv: outcome.csv,
        ok: outcome.ok,
    }
}

/// Parses `argv` and runs the command in-process; used by `selftest` to
/// compare reruns byte for byte.
pub fn run_args<I, S>(argv: I) -> Result<Artifacts, String>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| e.to_string())?;
    let outcome = cli.command.run().map_err(|e| e.to_string())?;
    Ok(envelope(&cli.command, outcome))
}

fn write_artifacts(dir: &PathBuf, stem: &str, a: &Artifacts) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{stem}.json")), &a.json)?;
    if let Some(csv) = &a.csv {
        fs::write(dir.join(format!("{stem}.csv")), csv)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command.run() {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let artifacts = envelope(&cli.command, outcome);
    match cli.format {
        Format::Json => print!("{}", artifacts.json),
        Format::Csv => match &artifacts.csv {
            Some(csv) => print!("{csv}"),
            None => {
                eprintln!("error: `{}` has no CSV output", cli.command.name());
                return ExitCode::from(2);
            }
        },
    }
    if let Some(dir) = &cli.out_dir {
        let stem = cli.name.as_deref().unwrap_or(cli.command.name());
        if let Err(e) = write_artifacts(dir, stem, &artifacts) {
            eprintln!("error: cannot write artifacts to {}: {e}", dir.display());
            return ExitCode::from(2);
        }
    }
    if artifacts.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
