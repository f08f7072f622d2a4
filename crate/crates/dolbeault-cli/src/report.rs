//! Machine-readable run reports: named checks with thresholds, free
//! observations, embedded solver reports, and wall-clock timings kept under a
//! single key so tooling can diff reports across runs.

use std::collections::BTreeMap;
use std::path::Path;

use dolbeault::SolveReport;
use serde::Serialize;

use crate::config::{ConfigError, ExperimentConfig};

/// Which side of the threshold passes.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// Pass iff measured ≤ threshold.
    Upper,
    /// Pass iff measured ≥ threshold.
    Lower,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub pass: bool,
}

/// A measured value reported without a pass/fail contract.
#[derive(Debug, Clone, Serialize)]
pub struct Observation {
    pub name: String,
    pub value: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunReport {
    pub command: String,
    /// Echo of the fully resolved configuration: re-running it reproduces
    /// every measured value below.
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    pub observations: Vec<Observation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveReport>,
    pub passed: bool,
    /// Wall-clock milliseconds per phase. The only non-deterministic part of
    /// the report; consumers diffing runs should drop this key.
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(config: &ExperimentConfig) -> Self {
        RunReport {
            command: config.command.to_string(),
            config: config.clone(),
            checks: Vec::new(),
            observations: Vec::new(),
            solve: None,
            passed: true,
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn check_upper(&mut self, name: &str, measured: f64, threshold: f64) {
        let pass = measured.is_finite() && measured <= threshold;
        self.passed &= pass;
        self.checks.push(Check { name: name.into(), measured, threshold, bound: Bound::Upper, pass });
    }

    pub fn check_lower(&mut self, name: &str, measured: f64, threshold: f64) {
        let pass = measured.is_finite() && measured >= threshold;
        self.passed &= pass;
        self.checks.push(Check { name: name.into(), measured, threshold, bound: Bound::Lower, pass });
    }

    pub fn observe(&mut self, name: &str, value: f64) {
        self.observations.push(Observation { name: name.into(), value });
    }

    pub fn time(&mut self, name: &str, millis: f64) {
        self.timings_ms.insert(name.into(), millis);
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }

    /// Writes the report to `out` when given, stdout otherwise; always prints
    /// the one-line verdict to stderr.
    pub fn emit(&self, out: Option<&Path>) -> Result<(), ConfigError> {
        let json = self.to_json();
        match out {
            Some(path) => std::fs::write(path, &json)
                .map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display())))?,
            None => print!("{json}"),
        }
        let verdict = if self.passed { "pass" } else { "FAIL" };
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        if failed.is_empty() {
            eprintln!("{}: {verdict} ({} checks)", self.command, self.checks.len());
        } else {
            eprintln!(
                "{}: {verdict} ({} checks, failing: {})",
                self.command,
                self.checks.len(),
                failed.join(", ")
            );
        }
        Ok(())
    }
}

/// Writes CSV rows into `dir/name`, creating the directory if needed.
pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: impl Iterator<Item = String>,
) -> Result<(), ConfigError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| ConfigError(format!("cannot create {}: {e}", dir.display())))?;
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    let path = dir.join(name);
    std::fs::write(&path, text)
        .map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display())))
}

/// Appends the per-iteration fixed-point residuals as a CSV trace.
pub fn write_residual_history(dir: &Path, report: &SolveReport) -> Result<(), ConfigError> {
    write_csv(
        dir,
        "residual_history.csv",
        "iteration,residual",
        report
            .residual_history
            .iter()
            .enumerate()
            .map(|(i, r)| format!("{},{:.17e}", i + 1, r)),
    )
}
