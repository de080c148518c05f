//! The full verification battery, one verdict line per criterion.

use std::collections::BTreeMap;

use warpspec_core::cli::{run, ExperimentConfig, Subcommand};

const CRITERIA: [(&str, &str); 10] = [
    ("c1", "transforms reduce to FFT of the premultiplied signal"),
    ("c2", "forward/inverse round trip"),
    ("c3", "smeared bi-orthogonality converges to the test function"),
    ("c4", "basis eigenrelations and finite-difference order"),
    ("c5", "adjoint defect of the energy operators"),
    ("c6", "S(E) pairing: direct truncation vs Parseval"),
    ("c7", "separable solutions solve the Schrodinger equation; Crank-Nicolson order"),
    ("c8", "stationary-state orthogonality preserved in time"),
    ("c9", "multiplicative basis norm is not conserved"),
    ("c10", "bitwise reproducible artifacts"),
];

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let report = run(Subcommand::Suite, &ExperimentConfig::default(), out).unwrap();

    let mut by_criterion: BTreeMap<&str, Vec<_>> = BTreeMap::new();
    for c in &report.checks {
        let prefix = c.name.split('.').next().unwrap();
        by_criterion.entry(prefix).or_default().push(c);
    }
    let mut failed = Vec::new();
    for (id, what) in CRITERIA {
        let checks = by_criterion.get(id).map(Vec::as_slice).unwrap_or(&[]);
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        println!("{} criterion {id:>3}: {what}", if pass { "PASS" } else { "FAIL" });
        for c in checks {
            println!("       {}", c.describe());
        }
        if !pass {
            failed.push(id);
        }
    }
    println!("acceptance: {}/{} criteria pass", CRITERIA.len() - failed.len(), CRITERIA.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
    assert!(report.pass);

    // reproducibility, checked here independently of the suite's own comparison
    let mut compared = 0;
    for name in report.artifacts.iter().filter(|a| a.ends_with(".csv") && !a.starts_with("rerun/")) {
        if name == "summary.csv" {
            continue;
        }
        let a = std::fs::read(out.join(name)).unwrap();
        let b = std::fs::read(out.join("rerun").join(name)).unwrap();
        assert!(a == b, "{name} differs between runs");
        compared += 1;
    }
    assert!(compared >= 8, "only {compared} artifacts compared");

    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["subcommand"], "suite");
    assert_eq!(json["checks"].as_array().unwrap().len(), report.checks.len());
}
