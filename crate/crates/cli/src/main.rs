mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{Command, Loaded, Monotone, Overrides};

/// Robustness of MTL specifications over simulated traces, and mining of
/// parametric falsification domains.
#[derive(Debug, Parser)]
#[command(name = "paramine", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate a ground formula on a trace CSV or a single simulation.
    /// Exit code 0 when robustness > 0, 1 when ≤ 0, 2 on error.
    Robustness(RobustnessArgs),
    /// Mine one parameter vector with the configured priority.
    Mine(Common),
    /// Randomised exploration of the falsification domain.
    Rgda(Common),
    /// Structured exploration along bias-directed rays.
    Sda(Common),
    /// Full-factorial robustness grid.
    Sweep(Common),
    /// Run the command named by `algorithm` in the config.
    Run(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the simulation budget per search.
    #[arg(long)]
    budget: Option<usize>,
    /// Worker threads for parallel searches (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Treat the formula as monotone in this direction: +1 (increasing) or
    /// -1 (decreasing).
    #[arg(long, value_parser = parse_direction, allow_hyphen_values = true)]
    assume_monotone: Option<Monotone>,
}

#[derive(Debug, Args)]
struct RobustnessArgs {
    #[command(flatten)]
    common: Common,
    /// Trace CSV (overrides `robustness.trace`).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Also print the robustness at every sample.
    #[arg(long)]
    series: bool,
}

fn parse_direction(s: &str) -> Result<Monotone, String> {
    match s {
        "+1" | "1" | "increasing" => Ok(Monotone::Increasing),
        "-1" | "decreasing" => Ok(Monotone::Decreasing),
        _ => Err(format!("expected +1 or -1, got `{s}`")),
    }
}

fn run(cli: Cli) -> Result<u8> {
    let (common, fixed, trace, series) = match cli.command {
        Cmd::Robustness(a) => (a.common, Some(Command::Robustness), a.trace, a.series),
        Cmd::Mine(c) => (c, Some(Command::Mine), None, false),
        Cmd::Rgda(c) => (c, Some(Command::Rgda), None, false),
        Cmd::Sda(c) => (c, Some(Command::Sda), None, false),
        Cmd::Sweep(c) => (c, Some(Command::Sweep), None, false),
        Cmd::Run(c) => (c, None, None, false),
    };
    let overrides = Overrides {
        seed: common.seed,
        budget: common.budget,
        out: common.out,
        assume: common.assume_monotone,
        trace,
    };
    let mut loaded = Loaded::read(&common.config, &overrides)?;
    if series {
        loaded.config.robustness.series = true;
    }
    let command = match fixed.or(loaded.config.algorithm) {
        Some(c) => c,
        None => bail!(
            "config {}: `algorithm` is required for `run`",
            common.config.display()
        ),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = common.jobs {
        if jobs == 0 {
            bail!("--jobs must be at least 1");
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().context("starting worker threads")?;
    pool.install(|| commands::execute(command, &loaded))
        .with_context(|| format!("{} ({})", command.name(), common.config.display()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
