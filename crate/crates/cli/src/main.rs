use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use curvlab::fixture::{emit_fixture, FixtureKind, FixtureParams, TensorFile};
use curvlab::{run_suite, Format, Suite, SuiteConfig};

#[derive(Debug, Parser)]
#[command(name = "curvlab", version, about = "Verify sphere-average identities for Hermitian and Kähler curvature tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a verification suite and write a report.
    Run(RunArgs),
    /// Write a tensor fixture file.
    Fixture(FixtureArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Dimension to test; repeat for several.
    #[arg(long = "n", value_name = "N")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Monte Carlo samples per case (0 skips Monte Carlo).
    #[arg(long, default_value_t = 0)]
    mc_samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Report path (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tensor file to verify instead of random draws.
    #[arg(long)]
    fixture: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FixtureArgs {
    #[arg(long, value_enum)]
    kind: FixtureKind,
    #[arg(long)]
    n: Option<usize>,
    /// Constant holomorphic sectional curvature (constant-hsc).
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Diagonal values, comma separated (diagonal).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    diag: Vec<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output path (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_output(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => std::io::stdout().lock().write_all(text.as_bytes()).context("cannot write to standard output"),
    }
}

fn run(args: RunArgs) -> anyhow::Result<ExitCode> {
    let defaults = SuiteConfig::default();
    let config = SuiteConfig {
        suite: args.suite,
        n_list: if args.n.is_empty() { defaults.n_list } else { args.n },
        trials: args.trials,
        mc_samples: args.mc_samples,
        seed: args.seed,
        rel_tol: args.rel_tol,
        format: args.format,
        output: args.out,
        fixture: args.fixture,
    };
    let started = Instant::now();
    let report = run_suite(&config)?;
    write_output(config.output.as_ref(), &report.render())?;
    let s = report.summary;
    eprintln!(
        "{} cases, {} passed, {} failed ({} gating), worst rel_diff {:e}, worst near-zero abs_diff {:e}, {:.3}s",
        s.cases,
        s.passes,
        s.failures,
        s.gating_failures,
        s.worst_rel_diff,
        s.worst_abs_diff,
        started.elapsed().as_secs_f64()
    );
    Ok(if report.exit_ok() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn fixture(args: FixtureArgs) -> anyhow::Result<ExitCode> {
    let params = FixtureParams { n: args.n, c: args.c, diag: args.diag, seed: args.seed };
    let tensor = emit_fixture(args.kind, &params)?;
    write_output(args.out.as_ref(), &TensorFile::from_tensor(&tensor).to_json())?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Fixture(args) => fixture(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
