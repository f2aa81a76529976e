use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qglab::input::{parse_floats, resolve_groups, InputError};
use qglab::run::{run_suites, ConstructionChoice, Draws, RunConfig, Suite, DEFAULT_MAX_DIM};
use qglab_core::exec::ExecMode;

#[derive(Parser)]
#[command(name = "qglab", version, about = "Numerical certificates for finite quantum groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run check suites and write a JSON report.
    Verify(VerifyArgs),
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Builtin name, `all`, or path to a JSON Cayley table; comma separated.
    #[arg(long, default_value = "all")]
    group: String,
    #[arg(long, default_value = "both")]
    construction: String,
    /// Comma separated suite names or `all`; empty selects nothing.
    #[arg(long, default_value = "all")]
    suites: String,
    #[arg(long, default_value = "0.01,0.1,0.3")]
    epsilons: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report path; `-` writes to stdout.
    #[arg(long, default_value = "-")]
    out: PathBuf,
    /// Overrides the identity tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Overrides every per-check draw count.
    #[arg(long)]
    draws: Option<usize>,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

fn config(args: &VerifyArgs) -> Result<RunConfig, InputError> {
    let mut cfg = RunConfig {
        groups: resolve_groups(&args.group)?,
        construction: ConstructionChoice::parse(&args.construction)?,
        suites: Suite::parse_list(&args.suites)?,
        epsilons: parse_floats(&args.epsilons)?,
        seed: args.seed,
        ..RunConfig::default()
    };
    if let Some(t) = args.tol {
        cfg.tol = t;
    }
    if let Some(d) = args.draws {
        cfg.draws = Draws {
            structure: d,
            lemma: d,
            theta: d,
            bound: d,
        };
    }
    if let Ok(v) = std::env::var("QGLAB_MAX_DIM") {
        cfg.max_dim = v.trim().parse().map_err(|_| InputError::Number(v.clone()))?;
    } else {
        cfg.max_dim = DEFAULT_MAX_DIM;
    }
    if args.sequential {
        cfg.mode = ExecMode::Sequential;
    }
    Ok(cfg)
}

fn write_report(out: &PathBuf, json: &str) -> std::io::Result<()> {
    if out.as_os_str() == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(json.as_bytes())?;
        stdout.write_all(b"\n")
    } else {
        std::fs::write(out, format!("{json}\n"))
    }
}

fn main() -> ExitCode {
    let Command::Verify(args) = Cli::parse().command;
    let report = match config(&args).and_then(|cfg| run_suites(&cfg)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qglab: {e}");
            return ExitCode::from(2);
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Err(e) = write_report(&args.out, &json) {
        eprintln!("qglab: writing {}: {e}", args.out.display());
        return ExitCode::from(2);
    }
    for r in report.failures() {
        eprintln!(
            "FAIL {} {} {}/{}: residual {:.3e} tolerance {:.3e}",
            r.suite, r.check, r.group, r.construction, r.residual, r.tolerance
        );
    }
    eprintln!(
        "{} records, {} passed, {} failed",
        report.summary.total, report.summary.passed, report.summary.failed
    );
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
