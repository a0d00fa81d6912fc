use multidir::bishop_phelps::OrbitTrace;
use multidir::bridge::DualWitnessReport;
use multidir::derivative::{DerivativeEstimate, GrowthReport};
use multidir::witness::WitnessReport;
use multidir::Error;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::suite::SuiteReport;

/// One independent check and its verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub message: String,
}

impl From<&Error> for ErrorRecord {
    fn from(e: &Error) -> Self {
        ErrorRecord {
            kind: error_kind(e),
            message: e.to_string(),
        }
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch { .. } => "DimensionMismatch",
        Error::InvalidInput(_) => "InvalidInput",
        Error::ZeroInBody { .. } => "ZeroInBody",
        Error::UnboundedSearch => "UnboundedSearch",
        Error::AllInfinite { .. } => "AllInfinite",
        Error::InfiniteBase => "InfiniteBase",
        Error::AxiomViolation { .. } => "AxiomViolation",
        Error::ThresholdNotFound { .. } => "ThresholdNotFound",
        Error::Violation { .. } => "Violation",
        Error::StartNotInCloud => "StartNotInCloud",
        Error::ApexInBody => "ApexInBody",
        Error::ApexNotInCloud => "ApexNotInCloud",
        Error::PreconditionFailed(_) => "PreconditionFailed",
        Error::ToleranceNotMet { .. } => "ToleranceNotMet",
        Error::ClaimFailed { .. } => "ClaimFailed",
        Error::ConditionFailed(_) => "ConditionFailed",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Derivative {
        estimate: DerivativeEstimate,
        growth: Option<GrowthReport>,
    },
    Rolle {
        inf_f_body: f64,
        report: WitnessReport,
    },
    Lagrange {
        inf_f_body: f64,
        report: WitnessReport,
    },
    Dual {
        report: DualWitnessReport,
    },
    BpSearch {
        cloud_size: usize,
        extremal: Vec<f64>,
        trace: OrbitTrace,
    },
    Suite {
        report: SuiteReport,
    },
}

/// Everything a run produced except wall-clock timings, which live in a
/// separate file so that reports are reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub function: Option<String>,
    pub body: Option<String>,
    pub outcome: Option<Outcome>,
    pub error: Option<ErrorRecord>,
    pub checks: Vec<Check>,
    pub verified: bool,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// `0` when every check passed, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.verified {
            0
        } else {
            1
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
    /// Per-cell times for `suite`, in cell order.
    pub cells: Vec<(String, f64)>,
}

/// A CSV file: header plus rows of already formatted fields.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Keeps orbit rows for bodies in ℝ² and ℝ³ alike: coordinates go in one
/// space-separated field.
pub fn orbit_table(trace: &OrbitTrace) -> Table {
    let mut t = Table::new(&["step", "point", "nu", "candidates"]);
    for (i, p) in trace.points.iter().enumerate() {
        let coords: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        t.rows.push(vec![
            i.to_string(),
            coords.join(" "),
            trace.nus.get(i).map(|v| v.to_string()).unwrap_or_default(),
            trace
                .candidate_counts
                .get(i)
                .map(|v| v.to_string())
                .unwrap_or_default(),
        ]);
    }
    t
}

pub fn trace_table(est: &DerivativeEstimate) -> Table {
    let mut t = Table::new(&["k", "t_k", "inf_value", "quotient"]);
    for r in est.trace() {
        t.rows.push(vec![
            r.k.to_string(),
            r.t_k.to_string(),
            r.inf_value.to_string(),
            r.quotient.to_string(),
        ]);
    }
    t
}
