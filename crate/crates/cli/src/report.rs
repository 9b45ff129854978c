//! Machine-readable run reports and atomic file output.
//!
//! A report is a JSON tree: a `meta` block (command, seed, timestamp — the
//! timestamp is the only non-deterministic field), a list of named checks
//! with measured values and thresholds, the overall verdict, and
//! command-specific data. Files are written to a temporary sibling and
//! renamed into place.

use serde::Serialize;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub command: String,
    pub seed: u64,
    /// Seconds since the epoch; excluded from determinism comparisons.
    pub timestamp: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub meta: Meta,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub data: serde_json::Value,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Report {
            meta: Meta {
                command: command.into(),
                seed,
                timestamp,
            },
            passed: true,
            checks: Vec::new(),
            data: serde_json::Value::Null,
        }
    }

    /// Record `value <= threshold` (inclusive) as a named check.
    pub fn check_le(&mut self, name: &str, value: f64, threshold: f64) -> bool {
        let passed = value.is_finite() && value <= threshold;
        self.checks.push(Check {
            name: name.into(),
            passed,
            value,
            threshold,
        });
        self.passed &= passed;
        passed
    }

    /// Record `value >= threshold` as a named check.
    pub fn check_ge(&mut self, name: &str, value: f64, threshold: f64) -> bool {
        let passed = value.is_finite() && value >= threshold;
        self.checks.push(Check {
            name: name.into(),
            passed,
            value,
            threshold,
        });
        self.passed &= passed;
        passed
    }

    /// Record a boolean condition, storing 1/0 as the value.
    pub fn check_true(&mut self, name: &str, condition: bool) -> bool {
        self.checks.push(Check {
            name: name.into(),
            passed: condition,
            value: if condition { 1.0 } else { 0.0 },
            threshold: 1.0,
        });
        self.passed &= condition;
        condition
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn print_summary(&self, quiet: bool) {
        if quiet {
            return;
        }
        for check in &self.checks {
            println!(
                "{} {:<44} value = {:.6e}  threshold = {:.3e}",
                if check.passed { "PASS" } else { "FAIL" },
                check.name,
                check.value,
                check.threshold
            );
        }
        println!(
            "{}: {}",
            self.meta.command,
            if self.passed { "all checks passed" } else { "CHECKS FAILED" }
        );
    }
}

/// Write a file atomically: temp sibling, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_drive_the_verdict() {
        let mut r = Report::new("demo", 1);
        assert!(r.check_le("small", 1e-9, 1e-6));
        assert!(r.passed);
        assert!(!r.check_le("big", 2.0, 1.0));
        assert!(!r.passed);
        let json = r.to_json();
        assert!(json.contains("\"command\": \"demo\""));
        assert!(json.contains("\"passed\": false"));
    }

    #[test]
    fn non_finite_values_fail() {
        let mut r = Report::new("demo", 1);
        assert!(!r.check_le("nan", f64::NAN, 1.0));
    }
}
