use std::time::Instant;

use multidir::bishop_phelps::{
    bp_lemma_traced, extremal_point, orbit_bound_holds, verify_extremal, PointCloud,
};
use multidir::bridge::clarke_ledyaev_dual;
use multidir::derivative::{check_growth_with_schedule, multidir_derivative, TSchedule};
use multidir::geometry::sample::sample_body;
use multidir::geometry::Cone;
use multidir::oracles::inf_over_body;
use multidir::witness::{interval_grid, lagrange_witness, rolle_witness, verify_witness_at};
use multidir::{ConvexBody, Error, Objective, OracleKind, ScalarFunction, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Command, ExperimentConfig, Problem, DEFAULT_CLOUD_SIZE};
use crate::report::{orbit_table, trace_table, Check, ErrorRecord, Outcome, RunReport, Table, Timings};
use crate::suite::run_suite;
use crate::CliError;

/// Derivative checks are looser than value checks by this factor: the
/// estimator's own error is of the order of the smallest `t` times the
/// curvature, far above rounding.
pub const DERIV_TOL_FACTOR: f64 = 1e3;

/// `r − inf f(A)` used by `dual` when no `r` is given.
pub const DUAL_MARGIN: f64 = 0.1;
pub const DUAL_EPS: f64 = 0.2;

/// Radius of the cube holding generated `bp-search` clouds.
const CLOUD_BOX: f64 = 2.0;

pub fn deriv_tol(tol: f64) -> f64 {
    DERIV_TOL_FACTOR * tol
}

/// A finished run: report, timings and CSV traces keyed by output slot.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: RunReport,
    pub timings: Timings,
    pub trace: Option<Table>,
    pub orbit: Option<Table>,
    pub bridge: Option<Table>,
    pub suite: Option<Table>,
}

type Checked = (Outcome, Vec<Check>);

pub fn run(config: &ExperimentConfig) -> Result<RunOutput, CliError> {
    config.validate()?;
    let command = config.command.expect("validated");
    let started = Instant::now();
    let mut out = RunOutput {
        report: RunReport {
            command: command.name(),
            config: config.clone(),
            function: None,
            body: None,
            outcome: None,
            error: None,
            checks: Vec::new(),
            verified: false,
        },
        timings: Timings::default(),
        trace: None,
        orbit: None,
        bridge: None,
        suite: None,
    };

    let result = if command == Command::Suite {
        let (report, table, cells) = run_suite(config.seed, config.tol, config.grid);
        out.suite = Some(table);
        out.timings.cells = cells;
        let checks = report.checks();
        Ok((Outcome::Suite { report }, checks))
    } else {
        let p = config.problem()?;
        out.report.function = Some(p.function_label.clone());
        out.report.body = Some(p.body_label.clone());
        single(command, config, &p)
    };

    match result {
        Ok((outcome, checks)) => {
            match &outcome {
                Outcome::Derivative { estimate, .. } => out.trace = Some(trace_table(estimate)),
                Outcome::Rolle { report, .. } | Outcome::Lagrange { report, .. } => {
                    out.trace = Some(trace_table(&report.derivative))
                }
                Outcome::Dual { report } => out.bridge = Some(bridge_table(report)),
                Outcome::BpSearch { trace, .. } => out.orbit = Some(orbit_table(trace)),
                Outcome::Suite { .. } => {}
            }
            out.report.verified = !checks.is_empty() && checks.iter().all(|c| c.passed);
            out.report.checks = checks;
            out.report.outcome = Some(outcome);
        }
        Err(e @ (Error::InvalidInput(_) | Error::DimensionMismatch { .. })) => {
            return Err(CliError::Usage(e.to_string()));
        }
        Err(e) => out.report.error = Some(ErrorRecord::from(&e)),
    }
    out.timings.total_seconds = started.elapsed().as_secs_f64();
    Ok(out)
}

fn single(command: Command, c: &ExperimentConfig, p: &Problem) -> Result<Checked, Error> {
    match command {
        Command::Derivative => derivative_checks(p, c.schedule(), c.grid, c.tol, c.lambda),
        Command::Rolle => rolle_checks(p, c.grid, c.tol),
        Command::Lagrange => lagrange_checks(p, c.r, c.grid, c.tol),
        Command::Dual => dual_checks(p, c.r, c.eps.unwrap_or(DUAL_EPS), c.grid, c.seed),
        Command::BpSearch => bp_search(c, p),
        Command::Suite => unreachable!("handled by run"),
    }
}

fn bridge_table(r: &multidir::bridge::DualWitnessReport) -> Table {
    let mut t = Table::new(&[
        "n",
        "accepted",
        "inside",
        "pairing",
        "pairing_lower",
        "value_gap",
        "note",
    ]);
    for s in &r.bridge.steps {
        t.rows.push(vec![
            s.n.to_string(),
            s.accepted.to_string(),
            s.inside.to_string(),
            s.pairing.to_string(),
            s.pairing_lower.to_string(),
            s.value_gap.to_string(),
            s.note.clone().unwrap_or_default(),
        ]);
    }
    t
}

/// `min_{a ∈ sample(A)} ∇f(x)·a`, the exact directional derivative of a
/// smooth `f` over the sampled directions.
pub fn gradient_pairing(f: &ScalarFunction, x: &Vector, body: &ConvexBody, refinement: usize) -> f64 {
    let g = &f.subdifferential(x).generators[0];
    sample_body(body, refinement)
        .iter()
        .map(|a| g.dot(a))
        .fold(f64::INFINITY, f64::min)
}

/// Estimate at `x = apex` in the directions `A = body`; for gradient
/// oracles compare with the exact pairing, and run the growth check.
pub fn derivative_checks(
    p: &Problem,
    schedule: TSchedule,
    grid: usize,
    tol: f64,
    lambda: Option<f64>,
) -> Result<Checked, Error> {
    let f = &p.function;
    let est = multidir_derivative(f, &p.apex, &p.body, schedule, grid)?;
    let mut checks = vec![Check::new(
        "estimate_finite",
        est.estimate.is_finite(),
        format!("estimate {}", est.estimate),
    )];
    if f.oracle_kind() == OracleKind::Gradient {
        let exact = gradient_pairing(f, &p.apex, &p.body, grid);
        let gap = (est.estimate - exact).abs();
        checks.push(Check::new(
            "gradient_pairing",
            gap <= deriv_tol(tol),
            format!("|estimate - min grad.a| = {gap:e}"),
        ));
    }
    let lambda = lambda.or((est.estimate > 0.0).then_some(est.estimate / 2.0));
    let growth = match lambda {
        None => None,
        Some(l) => match check_growth_with_schedule(f, &p.apex, &p.body, l, schedule, grid) {
            Ok(g) => {
                checks.push(Check::new(
                    "growth",
                    true,
                    format!("k = {}, eps_bar = {}, margin {:e}", g.k, g.eps_bar, g.min_margin),
                ));
                Some(g)
            }
            Err(Error::Violation { witness, gap }) => {
                checks.push(Check::new(
                    "growth",
                    false,
                    format!("violated at {witness:?} by {gap:e}"),
                ));
                None
            }
            Err(e) => return Err(e),
        },
    };
    Ok((
        Outcome::Derivative {
            estimate: est,
            growth,
        },
        checks,
    ))
}

/// Some grid point of `[a,A]` with `f ≤ bound + tol` and
/// `f⁻(·; A − a) ≥ target − deriv_tol`, found by exhaustive scan.
pub fn witness_set_nonempty<F: Objective>(
    f: &F,
    a: &Vector,
    body: &ConvexBody,
    bound: f64,
    target: f64,
    grid: usize,
    tol: f64,
) -> bool {
    let dirs = body.translate(&-a);
    interval_grid(a, body, grid).iter().any(|x| {
        f.value(x) <= bound + tol
            && multidir_derivative(f, x, &dirs, TSchedule::default(), grid)
                .map(|e| e.estimate >= target - deriv_tol(tol))
                .unwrap_or(false)
    })
}

pub fn rolle_checks(p: &Problem, grid: usize, tol: f64) -> Result<Checked, Error> {
    let (f, a, body) = (&p.function, &p.apex, &p.body);
    let fa = f.value(a);
    let inf = inf_over_body(f, body, grid)?;
    if !(fa <= inf + tol) {
        return Err(Error::PreconditionFailed(format!(
            "f(a) = {fa} exceeds the sampled inf f(A) = {inf}"
        )));
    }
    let w = rolle_witness(f, a, body, grid, tol)?;
    let dtol = deriv_tol(tol);
    let checks = vec![
        Check::new(
            "value",
            w.f_at_witness <= fa + tol,
            format!("f(x) - f(a) = {:e}", w.f_at_witness - fa),
        ),
        Check::new(
            "derivative",
            w.derivative.estimate >= -dtol,
            format!("estimate {}", w.derivative.estimate),
        ),
        Check::new("membership", w.membership_ok, "x in [a,A]"),
        Check::new(
            "verify_witness",
            verify_witness_at(f, a, body, fa, &w.witness, 2.0 * dtol, grid),
            "fresh estimate at the witness",
        ),
        Check::new(
            "witness_set_scan",
            witness_set_nonempty(f, a, body, fa, 0.0, grid, tol),
            "exhaustive grid scan",
        ),
    ];
    Ok((
        Outcome::Rolle {
            inf_f_body: inf,
            report: w,
        },
        checks,
    ))
}

/// `r` defaults to the sampled `inf f(A)`.
pub fn lagrange_checks(p: &Problem, r: Option<f64>, grid: usize, tol: f64) -> Result<Checked, Error> {
    let (f, a, body) = (&p.function, &p.apex, &p.body);
    let inf = inf_over_body(f, body, grid)?;
    let r = r.unwrap_or(inf);
    let w = lagrange_witness(f, a, body, r, grid, tol)?;
    let fa = w.f_at_apex;
    let dtol = deriv_tol(tol);
    let gap = w.lifted.as_ref().map(|l| l.identity_gap).unwrap_or(f64::NAN);
    let checks = vec![
        Check::new(
            "value",
            w.f_at_witness <= fa.max(r) + tol,
            format!("f(x) - max(f(a), r) = {:e}", w.f_at_witness - fa.max(r)),
        ),
        Check::new(
            "derivative",
            w.derivative.estimate >= r - fa - dtol,
            format!("estimate {} vs r - f(a) = {}", w.derivative.estimate, r - fa),
        ),
        Check::new("membership", w.membership_ok, "x in [a,A]"),
        Check::new(
            "verify_witness",
            verify_witness_at(f, a, body, r, &w.witness, 2.0 * dtol, grid),
            "fresh estimate at the witness",
        ),
        Check::new(
            "lifted_identity",
            gap <= 2.0 * dtol,
            format!("|lifted - (estimate - kappa)| = {gap:e}"),
        ),
    ];
    Ok((
        Outcome::Lagrange {
            inf_f_body: inf,
            report: w,
        },
        checks,
    ))
}

/// `r` defaults to `inf f(A) − 0.1`.
pub fn dual_checks(
    p: &Problem,
    r: Option<f64>,
    eps: f64,
    grid: usize,
    seed: u64,
) -> Result<Checked, Error> {
    let (f, a, body) = (&p.function, &p.apex, &p.body);
    let r = match r {
        Some(r) => r,
        None => inf_over_body(f, body, grid)? - DUAL_MARGIN,
    };
    let rep = clarke_ledyaev_dual(f, a, body, r, eps, grid, seed)?;
    let mut checks: Vec<Check> = rep
        .params
        .checks()
        .into_iter()
        .map(|(name, ok)| Check::new(format!("params.{name}"), ok, ""))
        .collect();
    checks.extend([
        Check::new(
            "membership",
            rep.membership,
            format!("dist(xi, [a,A]) = {:e} < eps", rep.interval_distance),
        ),
        Check::new(
            "value_bound",
            rep.value_bound,
            format!("max(f(a), r) + eps - f(xi) = {:e}", rep.value_slack),
        ),
        Check::new(
            "pairing_bound",
            rep.pairing_bound,
            format!("inf p(A) - p.a = {} vs r - f(a) = {}", rep.pairing, r - rep.f_at_apex),
        ),
        Check::new(
            "lifted_pairing",
            rep.lifted_pairing_ok,
            format!("{:e}", rep.lifted_pairing),
        ),
        Check::new(
            "subgradient",
            f.contains_subgradient(&rep.xi, &rep.p, 1e-9),
            "p in the subdifferential at xi",
        ),
    ]);
    Ok((Outcome::Dual { report: rep }, checks))
}

/// Seeded uniform points in `[-2, 2]ⁿ`.
pub fn random_cloud(dim: usize, size: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|_| Vector::from_fn(dim, |_, _| rng.gen_range(-CLOUD_BOX..=CLOUD_BOX)))
        .collect()
}

fn bp_search(c: &ExperimentConfig, p: &Problem) -> Result<Checked, Error> {
    let dim = p.body.dim();
    let points = match &c.cloud {
        Some(pts) => pts.iter().map(|v| Vector::from_vec(v.clone())).collect(),
        None => random_cloud(dim, c.cloud_size.unwrap_or(DEFAULT_CLOUD_SIZE), c.seed),
    };
    if points.is_empty() {
        return Err(Error::InvalidInput("cloud is empty".into()));
    }
    let cloud = PointCloud::new(points, c.tol)?;
    let start = match &c.start {
        Some(s) => Vector::from_vec(s.clone()),
        None => cloud.points()[0].clone(),
    };
    let (x, trace) = extremal_point(&cloud, &p.body, &start, c.tol)?;
    let offender = verify_extremal(&cloud, &p.body, &x, c.tol);
    let checks = vec![
        Check::new(
            "no_successor",
            offender.is_none(),
            match &offender {
                None => "exhaustive scan found no successor".to_string(),
                Some(y) => format!("successor {:?}", y.as_slice()),
            },
        ),
        Check::new(
            "orbit_bound",
            orbit_bound_holds(&trace, &p.body, c.tol)?,
            format!("{} steps", trace.points.len() - 1),
        ),
    ];
    Ok((
        Outcome::BpSearch {
            cloud_size: cloud.len(),
            extremal: x.as_slice().to_vec(),
            trace,
        },
        checks,
    ))
}

/// Extremal point of a sublevel cloud `M ∋ a` of `f` inside `[a,A]`'s
/// neighbourhood, checked by exhaustive scan and the orbit length bound.
pub fn bp_lemma_checks(p: &Problem, grid: usize, tol: f64, seed: u64) -> Result<Checked, Error> {
    let (f, a, body) = (&p.function, &p.apex, &p.body);
    let level = f.value(a) + tol;
    let radius = body.translate(&-a).sup_norm();
    let mut points = vec![a.clone()];
    points.extend(interval_grid(a, body, grid));
    points.extend(
        random_cloud(a.len(), 64, seed)
            .into_iter()
            .map(|u| a + u * (radius / CLOUD_BOX)),
    );
    points.retain(|x| f.value(x) <= level);
    let cloud = PointCloud::new(points, tol)?;
    let o = bp_lemma_traced(&cloud, a, body, tol)?;
    let shifted = body.translate(&-a);
    let translated = PointCloud::new(cloud.points().iter().map(|m| m - a).collect(), tol)?;
    let offender = verify_extremal(&translated, &shifted, &o.extremal, tol);
    let cone = Cone::from_directions(Vector::zeros(a.len()), shifted.clone());
    let in_cone = o.extremal.norm() <= tol || cone.contains(&o.extremal, tol);
    let x = a + &o.extremal;
    let checks = vec![
        Check::new("in_cone", in_cone, "x - a in C(0; A - a)"),
        Check::new(
            "sublevel",
            f.value(&x) <= level,
            format!("f(x) - f(a) = {:e}", f.value(&x) - f.value(a)),
        ),
        Check::new(
            "no_successor",
            offender.is_none(),
            format!("cloud of {} points", cloud.len()),
        ),
        Check::new(
            "orbit_bound",
            orbit_bound_holds(&o.trace, &shifted, tol)?,
            format!("{} steps", o.trace.points.len() - 1),
        ),
    ];
    Ok((
        Outcome::BpSearch {
            cloud_size: cloud.len(),
            extremal: x.as_slice().to_vec(),
            trace: o.trace,
        },
        checks,
    ))
}
