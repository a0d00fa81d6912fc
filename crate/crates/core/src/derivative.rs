//! The multidirectional lower derivative `f⁻(x;A)` and the growth bound it
//! implies near `x` on the cone `x + C(0;A)`.

use serde::{Deserialize, Serialize};

use crate::exec::{self, Backend};
use crate::geometry::{cone_stats, sample::sample_body, ConvexBody};
use crate::{Error, Objective, Result, Vector, DEFAULT_TOL};

/// Geometric schedule `t_k = t0·ρᵏ`, `k = 0..K`, whose last `m` quotients
/// stand in for the liminf.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TSchedule {
    pub t0: f64,
    pub rho: f64,
    pub steps: usize,
    pub tail_window: usize,
}

impl Default for TSchedule {
    fn default() -> Self {
        TSchedule {
            t0: 0.1,
            rho: 0.7,
            steps: 40,
            tail_window: 10,
        }
    }
}

impl TSchedule {
    pub fn new(t0: f64, rho: f64, steps: usize, tail_window: usize) -> Result<Self> {
        let s = TSchedule {
            t0,
            rho,
            steps,
            tail_window,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.t0 > 0.0
            && self.t0.is_finite()
            && self.rho > 0.0
            && self.rho < 1.0
            && self.steps >= 1
            && (1..=self.steps).contains(&self.tail_window)
            && self.t(self.steps - 1) > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid t-schedule {self:?}")))
        }
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t0 * self.rho.powi(k as i32)
    }

    pub fn ts(&self) -> Vec<f64> {
        (0..self.steps).map(|k| self.t(k)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivativeEstimate {
    pub ts: Vec<f64>,
    /// `inf f(x + t_k A)` over the sample.
    pub inf_values: Vec<f64>,
    pub quotients: Vec<f64>,
    pub estimate: f64,
    pub f_at_x: f64,
    pub schedule: TSchedule,
    pub refinement: usize,
}

/// One CSV row of the quotient trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub k: usize,
    pub t_k: f64,
    pub inf_value: f64,
    pub quotient: f64,
}

impl DerivativeEstimate {
    pub fn trace(&self) -> Vec<TraceRow> {
        (0..self.ts.len())
            .map(|k| TraceRow {
                k,
                t_k: self.ts[k],
                inf_value: self.inf_values[k],
                quotient: self.quotients[k],
            })
            .collect()
    }

    /// Minimum over the last `m` quotients.
    pub fn tail_min(&self, m: usize) -> f64 {
        let n = self.quotients.len();
        self.quotients[n - m.clamp(1, n)..]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn multidir_derivative<F: Objective + ?Sized>(
    f: &F,
    x: &Vector,
    body: &ConvexBody,
    schedule: TSchedule,
    refinement: usize,
) -> Result<DerivativeEstimate> {
    multidir_derivative_with(Backend::default(), f, x, body, schedule, refinement)
}

/// Samples `A` once; level `k` evaluates `f(x + t_k a)` at every sample `a`.
pub fn multidir_derivative_with<F: Objective + ?Sized>(
    backend: Backend,
    f: &F,
    x: &Vector,
    body: &ConvexBody,
    schedule: TSchedule,
    refinement: usize,
) -> Result<DerivativeEstimate> {
    schedule.validate()?;
    Error::check_dim(body.dim(), x)?;
    let fx = f.value(x);
    if !fx.is_finite() {
        return Err(Error::InfiniteBase);
    }
    let samples = sample_body(body, refinement);
    let ts = schedule.ts();
    let inf_values: Vec<f64> = exec::map_range(backend, ts.len(), |k| {
        let t = ts[k];
        samples
            .iter()
            .map(|a| f.value(&(x + a * t)))
            .fold(f64::INFINITY, f64::min)
    });
    if let Some(level) = inf_values.iter().position(|v| !v.is_finite()) {
        return Err(Error::AllInfinite { level: Some(level) });
    }
    let quotients: Vec<f64> = ts
        .iter()
        .zip(&inf_values)
        .map(|(t, v)| (v - fx) / t)
        .collect();
    let mut est = DerivativeEstimate {
        ts,
        inf_values,
        quotients,
        estimate: 0.0,
        f_at_x: fx,
        schedule,
        refinement,
    };
    est.estimate = est.tail_min(schedule.tail_window);
    Ok(est)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub lambda: f64,
    /// `k = λ/s`.
    pub k: f64,
    /// `ε̄ = μ·δ_t`.
    pub eps_bar: f64,
    /// Largest `t` of the trace below which every quotient exceeds `λ`.
    pub delta_t: f64,
    pub s: f64,
    pub mu: f64,
    pub estimate: f64,
    /// Cone samples at which the growth inequality was checked.
    pub checked: usize,
    /// `min (f(y) − f(x) − k‖y − x‖)` over the samples.
    pub min_margin: f64,
}

/// Number of radial steps per direction in the growth verification.
const GROWTH_RADIAL_STEPS: usize = 24;

pub fn check_growth<F: Objective + ?Sized>(
    f: &F,
    x: &Vector,
    body: &ConvexBody,
    lambda: f64,
    refinement: usize,
) -> Result<GrowthReport> {
    check_growth_with_schedule(f, x, body, lambda, TSchedule::default(), refinement)
}

/// Derives `k` and `ε̄` from the quotient trace and verifies
/// `f(y) − f(x) ≥ k‖y − x‖` on `y = x + τa`, `a` sampled in `A`,
/// `0 ≤ τ‖a‖ ≤ ε̄`.
pub fn check_growth_with_schedule<F: Objective + ?Sized>(
    f: &F,
    x: &Vector,
    body: &ConvexBody,
    lambda: f64,
    schedule: TSchedule,
    refinement: usize,
) -> Result<GrowthReport> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput("lambda must be > 0".into()));
    }
    let stats = cone_stats(body, DEFAULT_TOL)?;
    let est = multidir_derivative(f, x, body, schedule, refinement)?;
    if !(lambda < est.estimate) {
        return Err(Error::PreconditionFailed(format!(
            "lambda = {lambda} is not below the derivative estimate {}",
            est.estimate
        )));
    }
    let q = &est.quotients;
    let first = q
        .iter()
        .rposition(|&v| v <= lambda)
        .map_or(0, |i| i + 1);
    if first == q.len() {
        return Err(Error::ThresholdNotFound { lambda });
    }
    let delta_t = est.ts[first];
    let k = lambda / stats.s;
    let eps_bar = stats.mu * delta_t;

    let space = body.space();
    let fx = est.f_at_x;
    let slack = 1e-12 * (1.0 + fx.abs());
    let mut report = GrowthReport {
        lambda,
        k,
        eps_bar,
        delta_t,
        s: stats.s,
        mu: stats.mu,
        estimate: est.estimate,
        checked: 0,
        min_margin: f64::INFINITY,
    };
    for a in sample_body(body, refinement) {
        let reach = eps_bar / space.norm(&a);
        for j in 0..=GROWTH_RADIAL_STEPS {
            let y = x + &a * (reach * j as f64 / GROWTH_RADIAL_STEPS as f64);
            let margin = f.value(&y) - fx - k * space.dist(&y, x);
            report.checked += 1;
            if margin < report.min_margin {
                report.min_margin = margin;
            }
            if margin < -slack {
                return Err(Error::Violation {
                    witness: y.iter().copied().collect(),
                    gap: -margin,
                });
            }
        }
    }
    Ok(report)
}
