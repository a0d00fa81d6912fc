//! Witnesses for the primal mean value inequality: a point `x̄ ∈ [a,A]` with
//! `f(x̄) ≤ max{f(a), r}` and `f⁻(x̄; A − a) ≥ r − f(a)`.

use serde::Serialize;

use crate::bishop_phelps::{bp_lemma, PointCloud};
use crate::derivative::{multidir_derivative, DerivativeEstimate, TSchedule};
use crate::exec::{self, Backend};
use crate::geometry::{sample::sample_body, ConvexBody, MultiInterval};
use crate::oracles::{inf_over_body, lift};
use crate::{Error, Objective, Result, ScalarFunction, Vector};

/// Refinement of the fresh derivative estimate in [`verify_witness`].
pub const VERIFY_REFINEMENT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessBranch {
    /// `f(a) < inf f(A)`: orbit on the sublevel cloud from `a`.
    Strict,
    /// `f(a) = inf f(A)`: the orbit from `a` already gives a witness.
    EqualityOrbit,
    /// A grid point `a′` with `f(a′) < inf f(A)` replaces the apex.
    Reduced,
    /// `a` itself.
    Apex,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discretization {
    pub grid: usize,
    /// Distinct points of the `[a,A]` grid.
    pub grid_points: usize,
    /// Points of the sublevel cloud handed to the orbit search.
    pub sublevel_size: usize,
    pub branch: WitnessBranch,
}

/// The lifted side of a Lagrange witness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftedWitness {
    /// `(x̄, t̄)`.
    #[serde(with = "crate::serde_vector")]
    pub witness: Vector,
    pub kappa: f64,
    /// Estimate of `f̃⁻((x̄,t̄); Ã − ã)`.
    pub estimate: f64,
    /// `|f̃⁻ − (f⁻ − κ)|` between the two estimates.
    pub identity_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    #[serde(with = "crate::serde_vector")]
    pub witness: Vector,
    pub f_at_witness: f64,
    pub f_at_apex: f64,
    /// `f(a)` for Rolle, `max{f(a), r}` for Lagrange.
    pub bound_checked: f64,
    /// Estimate of `f⁻(x̄; A − a)`.
    pub derivative: DerivativeEstimate,
    /// `0` for Rolle, `r − f(a)` for Lagrange.
    pub target: f64,
    pub slack: f64,
    pub discretization: Discretization,
    pub value_ok: bool,
    pub derivative_ok: bool,
    pub membership_ok: bool,
    pub verified: bool,
    pub lifted: Option<LiftedWitness>,
}

/// The grid `{a + (i/grid)(y − a)}` over `i = 0..=grid` and sampled `y ∈ A`,
/// without duplicates.
pub fn interval_grid(apex: &Vector, body: &ConvexBody, grid: usize) -> Vec<Vector> {
    let ys = sample_body(body, grid);
    let mut pts = Vec::with_capacity(ys.len() * (grid + 1));
    pts.push(apex.clone());
    for i in 1..=grid {
        let s = i as f64 / grid as f64;
        for y in &ys {
            pts.push(apex + (y - apex) * s);
        }
    }
    PointCloud::new(pts, 0.0)
        .map(|c| c.points().to_vec())
        .unwrap_or_default()
}

struct Located {
    witness: Vector,
    grid_points: usize,
    sublevel_size: usize,
    branch: WitnessBranch,
}

fn sublevel(f: &dyn Objective, pts: &[Vector], level: f64) -> Result<PointCloud> {
    let vals = exec::map(Backend::default(), pts, |x| f.value(x));
    let m: Vec<Vector> = pts
        .iter()
        .zip(vals)
        .filter(|(_, v)| *v <= level)
        .map(|(x, _)| x.clone())
        .collect();
    PointCloud::new(m, 0.0)
}

fn locate(
    f: &dyn Objective,
    apex: &Vector,
    body: &ConvexBody,
    grid: usize,
    tol: f64,
) -> Result<Located> {
    let fn_tol = tol / 2.0;
    let deriv_tol = tol / 2.0;
    let fa = f.value(apex);
    if !fa.is_finite() {
        return Err(Error::InfiniteBase);
    }
    let inf_a = inf_over_body(f, body, grid)?;
    if fa > inf_a + tol {
        return Err(Error::PreconditionFailed(format!(
            "f(a) = {fa} exceeds the sampled inf f(A) = {inf_a}"
        )));
    }
    let pts = interval_grid(apex, body, grid);
    let apex_in_body = body.contains(apex, tol);

    // the sublevel set misses A in the strict case, so the orbit lemma applies
    let m = sublevel(f, &pts, fa + fn_tol)?;
    let orbit = if apex_in_body {
        None
    } else {
        match bp_lemma(&m, apex, body, tol.max(crate::DEFAULT_TOL)) {
            Ok(x) => Some(x),
            Err(Error::ApexInBody) => None,
            Err(e) => return Err(e),
        }
    };
    if fa < inf_a - fn_tol {
        if let Some(x) = orbit {
            return Ok(Located {
                witness: x,
                grid_points: pts.len(),
                sublevel_size: m.len(),
                branch: WitnessBranch::Strict,
            });
        }
    }

    let directions = body.translate(&-apex);
    if let Some(x) = orbit {
        let est = multidir_derivative(f, &x, &directions, TSchedule::default(), grid)?;
        if est.estimate >= -deriv_tol {
            return Ok(Located {
                witness: x,
                grid_points: pts.len(),
                sublevel_size: m.len(),
                branch: WitnessBranch::EqualityOrbit,
            });
        }
    }

    // a grid point strictly below inf f(A), off the far face
    let inner: Vec<Vector> = pts
        .iter()
        .filter(|x| !body.contains(x, tol))
        .cloned()
        .collect();
    if let Some((i, v)) = exec::argmin(Backend::default(), &inner, |x| f.value(x)) {
        if v < inf_a - fn_tol {
            let a2 = inner[i].clone();
            let pts2 = interval_grid(&a2, body, grid);
            let m2 = sublevel(f, &pts2, v + fn_tol)?;
            if let Ok(x) = bp_lemma(&m2, &a2, body, tol.max(crate::DEFAULT_TOL)) {
                return Ok(Located {
                    witness: x,
                    grid_points: pts.len() + pts2.len(),
                    sublevel_size: m2.len(),
                    branch: WitnessBranch::Reduced,
                });
            }
        }
    }
    Ok(Located {
        witness: apex.clone(),
        grid_points: pts.len(),
        sublevel_size: m.len(),
        branch: WitnessBranch::Apex,
    })
}

/// Witness for `f(a) ≤ inf f(A)`: `x̄ ∈ [a,A]`, `f(x̄) ≤ f(a)`,
/// `f⁻(x̄; A − a) ≥ 0`, each up to half of `tol`.
pub fn rolle_witness<F: Objective>(
    f: &F,
    apex: &Vector,
    body: &ConvexBody,
    grid: usize,
    tol: f64,
) -> Result<WitnessReport> {
    Error::check_dim(body.dim(), apex)?;
    if grid == 0 {
        return Err(Error::InvalidInput("grid must be positive".into()));
    }
    let loc = locate(f, apex, body, grid, tol)?;
    let fa = f.value(apex);
    report(f, apex, body, loc, fa, 0.0, grid, tol, None)
}

#[allow(clippy::too_many_arguments)]
fn report<F: Objective + ?Sized>(
    f: &F,
    apex: &Vector,
    body: &ConvexBody,
    loc: Located,
    bound: f64,
    target: f64,
    grid: usize,
    tol: f64,
    lifted: Option<LiftedWitness>,
) -> Result<WitnessReport> {
    let x = loc.witness;
    let fx = f.value(&x);
    let derivative = multidir_derivative(f, &x, &body.translate(&-apex), TSchedule::default(), grid)?;
    let slack = derivative.estimate - target;
    let value_ok = fx <= bound + tol / 2.0;
    let derivative_ok = slack >= -tol / 2.0;
    let membership_ok = MultiInterval::new(apex.clone(), body.clone())?.contains(&x, tol.max(crate::DEFAULT_TOL));
    Ok(WitnessReport {
        f_at_witness: fx,
        f_at_apex: f.value(apex),
        bound_checked: bound,
        target,
        slack,
        discretization: Discretization {
            grid,
            grid_points: loc.grid_points,
            sublevel_size: loc.sublevel_size,
            branch: loc.branch,
        },
        value_ok,
        derivative_ok,
        membership_ok,
        verified: value_ok && derivative_ok && membership_ok,
        witness: x,
        derivative,
        lifted,
    })
}

/// Witness for `r ≤ inf f(A)`: `x̄ ∈ [a,A]` with `f(x̄) ≤ max{f(a), r}` and
/// `f⁻(x̄; A − a) ≥ r − f(a)`, found as a Rolle witness of
/// `f̃(x,t) = f(x) − (r − f(a))t` for `ã = (a,0)` and `Ã = A × {1}`.
pub fn lagrange_witness(
    f: &ScalarFunction,
    apex: &Vector,
    body: &ConvexBody,
    r: f64,
    grid: usize,
    tol: f64,
) -> Result<WitnessReport> {
    Error::check_dim(body.dim(), apex)?;
    if grid == 0 {
        return Err(Error::InvalidInput("grid must be positive".into()));
    }
    let fa = f.value(apex);
    if !fa.is_finite() {
        return Err(Error::InfiniteBase);
    }
    let inf_a = inf_over_body(f, body, grid)?;
    if r > inf_a + tol {
        return Err(Error::PreconditionFailed(format!(
            "r = {r} exceeds the sampled inf f(A) = {inf_a}"
        )));
    }
    let kappa = r - fa;
    let lp = lift(f, kappa);
    let a_lift = lp.lift_point(apex);
    let body_lift = lp.lift_body(body)?;
    let loc = locate(&lp.function, &a_lift, &body_lift, grid, tol)?;

    let n = apex.len();
    let lifted_x = loc.witness.clone();
    let lifted_est = multidir_derivative(
        &lp.function,
        &lifted_x,
        &body_lift.translate(&-&a_lift),
        TSchedule::default(),
        grid,
    )?;
    let x = lifted_x.rows(0, n).into_owned();
    let loc = Located {
        witness: x,
        ..loc
    };
    let mut rep = report(f, apex, body, loc, fa.max(r), kappa, grid, tol, None)?;
    rep.lifted = Some(LiftedWitness {
        identity_gap: (lifted_est.estimate - (rep.derivative.estimate - kappa)).abs(),
        witness: lifted_x,
        kappa,
        estimate: lifted_est.estimate,
    });
    Ok(rep)
}

/// Independent check of a Lagrange witness with a fresh derivative estimate
/// at [`VERIFY_REFINEMENT`].
pub fn verify_witness<F: Objective>(
    f: &F,
    apex: &Vector,
    body: &ConvexBody,
    r: f64,
    candidate: &Vector,
    tol: f64,
) -> bool {
    verify_witness_at(f, apex, body, r, candidate, tol, VERIFY_REFINEMENT)
}

/// As [`verify_witness`] with an explicit sampling refinement. When `r` is a
/// sampled infimum, checking at the refinement that produced it keeps the
/// two sides of the inequality on the same sample.
pub fn verify_witness_at<F: Objective>(
    f: &F,
    apex: &Vector,
    body: &ConvexBody,
    r: f64,
    candidate: &Vector,
    tol: f64,
    refinement: usize,
) -> bool {
    let inside = MultiInterval::new(apex.clone(), body.clone())
        .map(|iv| iv.contains(candidate, tol.max(crate::DEFAULT_TOL)))
        .unwrap_or(false);
    if !inside {
        return false;
    }
    let fa = f.value(apex);
    let fx = f.value(candidate);
    if !(fx <= fa.max(r) + tol / 2.0) {
        return false;
    }
    match multidir_derivative(
        f,
        candidate,
        &body.translate(&-apex),
        TSchedule::default(),
        refinement,
    ) {
        Ok(e) => e.estimate >= r - fa - tol / 2.0,
        Err(_) => false,
    }
}
