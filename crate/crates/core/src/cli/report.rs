use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

use super::csvio;

/// Bumped whenever a field of [`Report`] changes meaning.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "relation", rename_all = "kebab-case")]
pub enum Relation {
    /// `value < tolerance`
    Below,
    /// `value > tolerance`
    Above,
    /// `|value − target| ≤ tolerance`
    Within { target: f64 },
}

/// One named numeric claim and its verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    #[serde(flatten)]
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64, relation: Relation) -> Self {
        // NaN fails every relation
        let pass = match relation {
            Relation::Below => value < tolerance,
            Relation::Above => value > tolerance,
            Relation::Within { target } => (value - target).abs() <= tolerance,
        };
        Self {
            name: name.into(),
            value,
            tolerance,
            relation,
            pass,
        }
    }

    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, tolerance, Relation::Below)
    }

    pub fn above(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, tolerance, Relation::Above)
    }

    pub fn within(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self::new(name, value, tolerance, Relation::Within { target })
    }

    pub fn describe(&self) -> String {
        let rel = match self.relation {
            Relation::Below => format!("< {:.1e}", self.tolerance),
            Relation::Above => format!("> {:.1e}", self.tolerance),
            Relation::Within { target } => format!("= {target} ± {}", self.tolerance),
        };
        format!(
            "{} {}: {:.3e} {rel}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub subcommand: String,
    pub inputs: serde_json::Value,
    pub scalars: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub wall_time_s: f64,
    pub artifacts: Vec<String>,
}

impl Report {
    pub fn new(subcommand: &str, inputs: serde_json::Value) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            subcommand: subcommand.to_string(),
            inputs,
            scalars: BTreeMap::new(),
            checks: Vec::new(),
            pass: true,
            wall_time_s: 0.0,
            artifacts: Vec::new(),
        }
    }

    /// A bare report carrying only scalars, e.g. one run of a refinement study.
    pub fn from_scalars(subcommand: &str, scalars: impl IntoIterator<Item = (String, f64)>) -> Self {
        let mut r = Self::new(subcommand, serde_json::Value::Null);
        r.scalars.extend(scalars);
        r
    }

    pub fn scalar(&mut self, name: impl Into<String>, value: f64) {
        self.scalars.insert(name.into(), value);
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// `(parameter, error)` rows of a refinement study and the least-squares slope of
/// `log error` against `log parameter`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub parameter: String,
    pub quantity: String,
    pub rows: Vec<(f64, f64)>,
    pub slope: f64,
}

impl ConvergenceTable {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows: Vec<Vec<f64>> = self.rows.iter().map(|&(p, e)| vec![p, e]).collect();
        csvio::write_table(path, &[&self.parameter, &self.quantity], &rows)
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Collects `(scalars[parameter], scalars[quantity])` from each run, sorted by the
/// parameter, and fits the convergence order.
pub fn emit_convergence_table(runs: &[Report], parameter: &str, quantity: &str) -> Result<ConvergenceTable> {
    if runs.len() < 3 {
        return Err(Error::InsufficientRuns(format!("{} run(s); a slope needs at least 3", runs.len())));
    }
    let mut rows = Vec::with_capacity(runs.len());
    for (i, r) in runs.iter().enumerate() {
        let get = |key: &str| {
            r.scalars
                .get(key)
                .copied()
                .ok_or_else(|| Error::InsufficientRuns(format!("run {i} has no scalar `{key}`")))
        };
        let (p, e) = (get(parameter)?, get(quantity)?);
        if !(p > 0.0 && e > 0.0 && p.is_finite() && e.is_finite()) {
            return Err(Error::InsufficientRuns(format!(
                "run {i}: {parameter} = {p}, {quantity} = {e}; a log-log fit needs positive finite values"
            )));
        }
        rows.push((p, e));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let distinct = 1 + rows.windows(2).filter(|w| w[1].0 > w[0].0).count();
    if distinct < 3 {
        return Err(Error::InsufficientRuns(format!(
            "only {distinct} distinct value(s) of `{parameter}`"
        )));
    }
    let slope = loglog_slope(&rows);
    Ok(ConvergenceTable {
        parameter: parameter.to_string(),
        quantity: quantity.to_string(),
        rows,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(dt: f64, err: f64) -> Report {
        Report::from_scalars("evolve", [("dt".to_string(), dt), ("error".to_string(), err)])
    }

    #[test]
    fn second_order_study() {
        let runs: Vec<Report> = [0.1, 0.05, 0.025, 0.0125].iter().map(|&dt| run(dt, 3.0 * dt * dt)).collect();
        let t = emit_convergence_table(&runs, "dt", "error").unwrap();
        assert!((t.slope - 2.0).abs() < 1e-12);
        assert_eq!(t.rows[0].0, 0.0125);
    }

    #[test]
    fn degenerate_studies_are_rejected() {
        let same: Vec<Report> = (0..4).map(|_| run(0.1, 1e-3)).collect();
        assert!(matches!(emit_convergence_table(&same, "dt", "error"), Err(Error::InsufficientRuns(_))));
        let two = vec![run(0.1, 1.0), run(0.05, 0.25)];
        assert!(matches!(emit_convergence_table(&two, "dt", "error"), Err(Error::InsufficientRuns(_))));
        let missing = vec![run(0.1, 1.0), run(0.05, 0.25), Report::from_scalars("evolve", [])];
        assert!(emit_convergence_table(&missing, "dt", "error").is_err());
    }

    #[test]
    fn verdicts() {
        assert!(Check::below("a", 1e-9, 1e-8).pass);
        assert!(!Check::below("a", f64::NAN, 1e-8).pass);
        assert!(Check::above("b", 2e-3, 1e-3).pass);
        assert!(Check::within("c", 3.9, 4.0, 0.3).pass);
        assert!(!Check::within("c", 3.6, 4.0, 0.3).pass);
        let mut r = Report::new("x", serde_json::Value::Null);
        r.check(Check::below("a", 1.0, 2.0));
        r.check(Check::below("b", 3.0, 2.0));
        assert!(!r.pass);
    }
}
