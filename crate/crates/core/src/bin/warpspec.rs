use clap::{Parser, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use warpspec_core::cli::{exit_code, run, thread_cap, ExperimentConfig, Subcommand};
use warpspec_core::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Transform,
    VerifyBiorth,
    Distribution,
    Evolve,
    Orthogonality,
    Suite,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::Transform => Subcommand::Transform,
            Command::VerifyBiorth => Subcommand::VerifyBiorth,
            Command::Distribution => Subcommand::Distribution,
            Command::Evolve => Subcommand::Evolve,
            Command::Orthogonality => Subcommand::Orthogonality,
            Command::Suite => Subcommand::Suite,
        }
    }
}

/// Warped and phase-modulated Fourier transforms, S(E) pairings and separable
/// Schrödinger solutions, checked against numerical oracles.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML experiment config (optional for `suite`)
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory for report.json and CSV artifacts
    #[arg(short, long, default_value = "warpspec-out")]
    out: PathBuf,
    /// Overrides the config seed
    #[arg(short, long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // the suite's coarse Crank–Nicolson steps trip the stability heuristic on purpose
    let level = if matches!(cli.command, Command::Suite) { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = thread_cap() {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not cap threads at {n}: {e}");
        }
    }
    let sub = Subcommand::from(cli.command);
    let cfg = match (&cli.config, sub) {
        (Some(path), _) => ExperimentConfig::load(path),
        (None, Subcommand::Suite) => Ok(ExperimentConfig::default()),
        (None, _) => Err(Error::ConfigParse(format!("`{}` needs --config", sub.name()))),
    };
    let outcome = cfg.and_then(|mut cfg| {
        if let Some(seed) = cli.seed {
            cfg.seed = seed;
        }
        run(sub, &cfg, &cli.out)
    });
    match &outcome {
        Ok(report) => {
            for c in &report.checks {
                println!("{}", c.describe());
            }
            println!(
                "{}: {} ({:.1}s), report in {}",
                sub.name(),
                if report.pass { "PASS" } else { "FAIL" },
                report.wall_time_s,
                cli.out.join("report.json").display()
            );
        }
        Err(e) => eprintln!("error[{}]: {e}", e.code()),
    }
    ExitCode::from(exit_code(&outcome) as u8)
}
