//! Experiment runner behind the `warpspec` binary: TOML config in, `report.json` and
//! CSV artifacts out.
//!
//! Exit codes: 0 all checks pass, 1 a check failed (the report is still written),
//! 2 config error, 3 numeric or I/O failure.

mod commands;
pub mod config;
pub mod csvio;
pub mod report;
pub mod suite;

use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};

pub use config::ExperimentConfig;
pub use report::{emit_convergence_table, loglog_slope, Check, ConvergenceTable, Relation, Report, REPORT_SCHEMA_VERSION};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "WARPSPEC_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Transform,
    VerifyBiorth,
    Distribution,
    Evolve,
    Orthogonality,
    Suite,
}

impl Subcommand {
    pub const ALL: [Subcommand; 6] = [
        Subcommand::Transform,
        Subcommand::VerifyBiorth,
        Subcommand::Distribution,
        Subcommand::Evolve,
        Subcommand::Orthogonality,
        Subcommand::Suite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Transform => "transform",
            Subcommand::VerifyBiorth => "verify-biorth",
            Subcommand::Distribution => "distribution",
            Subcommand::Evolve => "evolve",
            Subcommand::Orthogonality => "orthogonality",
            Subcommand::Suite => "suite",
        }
    }

    /// Check names this subcommand reports, with their default tolerances.
    pub fn tolerances(self) -> &'static [(&'static str, f64)] {
        match self {
            Subcommand::Transform => commands::TRANSFORM_TOLERANCES,
            Subcommand::VerifyBiorth => commands::BIORTH_TOLERANCES,
            Subcommand::Distribution => commands::DISTRIBUTION_TOLERANCES,
            Subcommand::Evolve => commands::EVOLVE_TOLERANCES,
            Subcommand::Orthogonality => commands::ORTHOGONALITY_TOLERANCES,
            Subcommand::Suite => suite::SUITE_TOLERANCES,
        }
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::ConfigParse(format!("unknown subcommand `{s}`")))
    }
}

/// Runs one subcommand, writing its artifacts and `report.json` into `out`.
///
/// Returns `Err` only when no verdict could be reached; failed checks come back as a
/// report with `pass == false`.
pub fn run(sub: Subcommand, cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    let start = Instant::now();
    let tol = cfg.tolerances(sub.tolerances())?;
    std::fs::create_dir_all(out)?;
    let inputs = serde_json::to_value(cfg).map_err(|e| Error::ConfigParse(e.to_string()))?;
    let mut report = Report::new(sub.name(), inputs);
    match sub {
        Subcommand::Transform => commands::transform(cfg, &tol, out, &mut report)?,
        Subcommand::VerifyBiorth => commands::verify_biorth(cfg, &tol, out, &mut report)?,
        Subcommand::Distribution => commands::distribution(cfg, &tol, out, &mut report)?,
        Subcommand::Evolve => commands::evolve(cfg, &tol, out, &mut report)?,
        Subcommand::Orthogonality => commands::orthogonality(cfg, &tol, out, &mut report)?,
        Subcommand::Suite => suite::suite(cfg.seed, &tol, out, &mut report)?,
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    report.artifacts.push("report.json".into());
    report.write_json(&out.join("report.json"))?;
    Ok(report)
}

pub fn exit_code(outcome: &Result<Report>) -> i32 {
    match outcome {
        Ok(r) if r.pass => 0,
        Ok(_) => 1,
        Err(Error::ConfigParse(_)) => 2,
        Err(_) => 3,
    }
}

/// Thread cap from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}
