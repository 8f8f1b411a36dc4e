//! Run reports, checks and CSV artifacts.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::Diagnostics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Passes iff `value ≤ tolerance` (errors and residuals).
    AtMost,
    /// Passes iff `value ≥ tolerance` (convergence orders).
    AtLeast,
}

/// One numeric check. Non-finite values never pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, comparison: Comparison::AtMost, pass: value.is_finite() && value <= tolerance }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, tolerance: bound, comparison: Comparison::AtLeast, pass: value.is_finite() && value >= bound }
    }

    /// `|value − expected| ≤ tolerance`, reported as the deviation.
    pub fn close(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self::at_most(name, (value - expected).abs(), tolerance)
    }

    /// A check that records a failed computation.
    pub fn failed(name: impl Into<String>, tolerance: f64) -> Self {
        Self::at_most(name, f64::NAN, tolerance)
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let op = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
        };
        let verdict = if self.pass { "ok" } else { "violated" };
        write!(f, "{} = {:.3e} ({op} {:.1e}) {verdict}", self.name, self.value, self.tolerance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// The scenario document as read.
    pub scenario: serde_json::Value,
    pub task: String,
    pub checks: Vec<Check>,
    /// Artifact file names, relative to the output directory.
    pub artifacts: Vec<String>,
    /// The only field that differs between identical runs.
    pub wall_clock_seconds: f64,
    pub pass: bool,
}

impl RunReport {
    pub fn new(scenario: serde_json::Value, task: impl Into<String>, checks: Vec<Check>, artifacts: Vec<String>, wall_clock_seconds: f64) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { scenario, task: task.into(), checks, artifacts, wall_clock_seconds, pass }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[derive(Serialize)]
struct DiagnosticsRow {
    step: usize,
    time: f64,
    length: f64,
    max_dual_length_drift: f64,
    com_x: f64,
    com_y: f64,
    com_z: f64,
}

/// Diagnostics series with header `step,time,length,max_dual_length_drift,com_x,com_y,com_z`.
pub fn write_diagnostics_csv(out: impl Write, rows: &[Diagnostics]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for d in rows {
        w.serialize(DiagnosticsRow {
            step: d.step,
            time: d.time,
            length: d.length,
            max_dual_length_drift: d.max_dual_length_drift,
            com_x: d.center_of_mass[0],
            com_y: d.center_of_mass[1],
            com_z: d.center_of_mass[2],
        })
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleRow {
    pub field_i: String,
    pub field_j: String,
    pub c_value: f64,
}

/// Cocycle table with header `field_i,field_j,c_value`.
pub fn write_cocycle_csv(out: impl Write, rows: &[CocycleRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_reject_nan() {
        assert!(!Check::at_most("x", f64::NAN, 1.0).pass);
        assert!(!Check::at_least("x", f64::NAN, 1.0).pass);
        assert!(Check::close("x", 0.5 + 1e-9, 0.5, 1e-6).pass);
        assert!(Check::at_least("order", 2.0, 1.9).pass);
    }

    #[test]
    fn cocycle_csv_header() {
        let mut buf = Vec::new();
        write_cocycle_csv(&mut buf, &[CocycleRow { field_i: "a".into(), field_j: "b".into(), c_value: 0.25 }]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "field_i,field_j,c_value\na,b,0.25\n");
    }
}
