use std::fmt::Write as _;
use std::time::Instant;

use multidir::exec::{self, Backend};
use multidir::geometry::standard_bodies;
use multidir::oracles::{catalog_all, OracleKind};
use multidir::{Error, Vector};
use serde::Serialize;

use crate::config::Problem;
use crate::report::{Check, ErrorRecord, Outcome, Table};
use crate::run::{bp_lemma_checks, dual_checks, lagrange_checks, rolle_checks};

pub const SUITE_DIMS: [usize; 2] = [2, 3];
pub const SUITE_CHECKS: [&str; 4] = ["bp", "rolle", "lagrange", "dual"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteCell {
    pub function: String,
    pub body: String,
    pub dim: usize,
    pub check: &'static str,
    pub status: CellStatus,
    pub checks: Vec<Check>,
    pub error: Option<ErrorRecord>,
    /// Point the cell certified: extremal point, witness or `ξ`.
    pub point: Option<Vec<f64>>,
}

impl SuiteCell {
    pub fn id(&self) -> String {
        format!("{}/{}/{}/R{}", self.check, self.function, self.body, self.dim)
    }

    /// The error, or the names of the failed checks.
    pub fn detail(&self) -> String {
        match &self.error {
            Some(e) => format!("{}: {}", e.kind, e.message),
            None => {
                let failed: Vec<&str> = self
                    .checks
                    .iter()
                    .filter(|k| !k.passed)
                    .map(|k| k.name.as_str())
                    .collect();
                failed.join(" ")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub check: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub tol: f64,
    pub grid: usize,
    pub summary: Vec<SummaryRow>,
    pub cells: Vec<SuiteCell>,
    pub passed: bool,
}

impl SuiteReport {
    /// One check per cell that ran.
    pub fn checks(&self) -> Vec<Check> {
        self.cells
            .iter()
            .filter(|c| c.status != CellStatus::Skipped)
            .map(|c| Check::new(c.id(), c.status == CellStatus::Pass, c.detail()))
            .collect()
    }

    pub fn status_matrix(&self) -> Vec<(String, CellStatus)> {
        self.cells.iter().map(|c| (c.id(), c.status)).collect()
    }

    pub fn summary_text(&self) -> String {
        let mut s = format!("{:<10} {:>6} {:>6} {:>8}\n", "check", "pass", "fail", "skipped");
        for r in &self.summary {
            let _ = writeln!(s, "{:<10} {:>6} {:>6} {:>8}", r.check, r.passed, r.failed, r.skipped);
        }
        s
    }
}

struct Task {
    dim: usize,
    function: &'static str,
    body: &'static str,
    check: &'static str,
    problem: Problem,
    dual_ok: bool,
}

fn tasks() -> Vec<Task> {
    let mut out = Vec::new();
    for dim in SUITE_DIMS {
        for e in catalog_all(dim) {
            let dual_ok = e.smooth || e.function.oracle_kind() == OracleKind::ConvexMaxAffine;
            for (bname, body) in standard_bodies(dim) {
                for check in SUITE_CHECKS {
                    out.push(Task {
                        dim,
                        function: e.name,
                        body: bname,
                        check,
                        problem: Problem {
                            function_label: e.name.to_string(),
                            function: e.function.clone(),
                            body_label: bname.to_string(),
                            body: body.clone(),
                            apex: Vector::zeros(dim),
                        },
                        dual_ok,
                    });
                }
            }
        }
    }
    out
}

fn run_cell(t: &Task, seed: u64, tol: f64, grid: usize) -> SuiteCell {
    let mut cell = SuiteCell {
        function: t.function.to_string(),
        body: t.body.to_string(),
        dim: t.dim,
        check: t.check,
        status: CellStatus::Skipped,
        checks: Vec::new(),
        error: None,
        point: None,
    };
    let result = match t.check {
        "bp" => bp_lemma_checks(&t.problem, grid, tol, seed),
        "rolle" => rolle_checks(&t.problem, grid, tol),
        "lagrange" => lagrange_checks(&t.problem, None, grid, tol),
        _ if !t.dual_ok => {
            cell.error = Some(ErrorRecord {
                kind: "Unsupported",
                message: "dual runs on smooth and max-affine oracles only".into(),
            });
            return cell;
        }
        _ => dual_checks(&t.problem, None, crate::run::DUAL_EPS, grid, seed),
    };
    match result {
        Ok((outcome, checks)) => {
            cell.point = match &outcome {
                Outcome::BpSearch { extremal, .. } => Some(extremal.clone()),
                Outcome::Rolle { report, .. } | Outcome::Lagrange { report, .. } => {
                    Some(report.witness.as_slice().to_vec())
                }
                Outcome::Dual { report } => Some(report.xi.as_slice().to_vec()),
                _ => None,
            };
            cell.status = if checks.iter().all(|c| c.passed) {
                CellStatus::Pass
            } else {
                CellStatus::Fail
            };
            cell.checks = checks;
        }
        Err(e @ Error::PreconditionFailed(_)) => cell.error = Some(ErrorRecord::from(&e)),
        Err(e) => {
            cell.status = CellStatus::Fail;
            cell.error = Some(ErrorRecord::from(&e));
        }
    }
    cell
}

/// Catalog × standard bodies × {ℝ², ℝ³} × the four checks. Cells run in
/// parallel; assembly is sequential and in a fixed order.
pub fn run_suite(seed: u64, tol: f64, grid: usize) -> (SuiteReport, Table, Vec<(String, f64)>) {
    let tasks = tasks();
    let timed = exec::map(Backend::default(), &tasks, |t| {
        let started = Instant::now();
        let cell = run_cell(t, seed, tol, grid);
        (cell, started.elapsed().as_secs_f64())
    });
    let mut cells = Vec::with_capacity(timed.len());
    let mut times = Vec::with_capacity(timed.len());
    for (cell, secs) in timed {
        times.push((cell.id(), secs));
        cells.push(cell);
    }
    let summary = SUITE_CHECKS
        .iter()
        .map(|&check| {
            let count = |s| cells.iter().filter(|c| c.check == check && c.status == s).count();
            SummaryRow {
                check,
                passed: count(CellStatus::Pass),
                failed: count(CellStatus::Fail),
                skipped: count(CellStatus::Skipped),
            }
        })
        .collect();

    let mut table = Table::new(&["check", "function", "body", "dim", "status", "detail"]);
    let report = SuiteReport {
        seed,
        tol,
        grid,
        passed: cells.iter().all(|c| c.status != CellStatus::Fail),
        summary,
        cells,
    };
    for cell in &report.cells {
        table.rows.push(vec![
            cell.check.to_string(),
            cell.function.clone(),
            cell.body.clone(),
            cell.dim.to_string(),
            format!("{:?}", cell.status).to_lowercase(),
            cell.detail(),
        ]);
    }
    (report, table, times)
}
