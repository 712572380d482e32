//! Run reports: named checks plus free-form data, printed as a summary and
//! optionally written as JSON.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Observed statistic the verdict is based on.
    pub value: f64,
    pub tolerance: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub data: serde_json::Map<String, Value>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into(), passed: true, checks: Vec::new(), notes: Vec::new(), data: Default::default() }
    }

    /// Check that passes when `value ≤ tolerance`.
    pub fn within(&mut self, name: &str, value: f64, tolerance: f64, detail: impl Into<String>) {
        self.check(name, value <= tolerance, value, Some(tolerance), detail);
    }

    pub fn check(&mut self, name: &str, passed: bool, value: f64, tolerance: Option<f64>, detail: impl Into<String>) {
        self.passed &= passed;
        self.checks.push(Check { name: name.into(), passed, value, tolerance, detail: detail.into() });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn data(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.data.insert(key.into(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn print_summary(&self) {
        println!("{}", self.command);
        for c in &self.checks {
            let tol = c.tolerance.map(|t| format!(" (tol {t:e})")).unwrap_or_default();
            println!("  {} {}: {}{tol}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        for n in &self.notes {
            println!("  note: {n}");
        }
        if !self.checks.is_empty() {
            let ok = self.checks.iter().filter(|c| c.passed).count();
            println!("{ok} of {} checks passed", self.checks.len());
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?);
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn any_failed_check_fails_the_report() {
        let mut r = Report::new("t");
        r.within("a", 1e-12, 1e-10, "");
        assert!(r.passed);
        r.within("b", 1e-3, 1e-6, "");
        r.within("c", 0.0, 1.0, "");
        assert!(!r.passed);
    }

    #[test]
    fn nan_never_passes() {
        let mut r = Report::new("t");
        r.within("a", f64::NAN, 1.0, "");
        assert!(!r.passed);
    }
}
