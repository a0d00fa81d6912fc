//! From a positive multidirectional derivative to a subgradient with a
//! positive pairing on `A`, and the dual mean value witness built on it.

mod dual;
mod fuzzy;
mod penalty;

use serde::Serialize;

pub use dual::{clarke_ledyaev_dual, DualCliParams, DualWitnessReport, LagrangeSummary};
pub use fuzzy::{fuzzy_min_pair, FuzzyPair};
pub use penalty::PenaltyFunction;

use crate::derivative::{check_growth, multidir_derivative, GrowthReport, TSchedule};
use crate::geometry::{cone_stats, sample::sample_body, Cone};
use crate::{ConvexBody, Error, Objective, Result, ScalarFunction, Vector, DEFAULT_TOL};

/// First penalty weight.
pub const N0: u64 = 8;
/// Last penalty weight tried.
pub const N_MAX: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BridgeOptions {
    pub refinement: usize,
    pub seed: u64,
    pub n0: u64,
    pub n_max: u64,
}

impl Default for BridgeOptions {
    fn default() -> Self {
        BridgeOptions {
            refinement: 12,
            seed: 0,
            n0: N0,
            n_max: N_MAX,
        }
    }
}

/// One penalty weight of the bridge loop.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BridgeStep {
    pub n: u64,
    /// Penalized minimization result, absent when the selection failed.
    pub pair: Option<FuzzyPair>,
    pub inside: bool,
    /// `inf p_n(A)`.
    pub pairing: f64,
    /// `inf q_n(−A) − s/n` over the sample of `A`.
    pub pairing_lower: f64,
    pub value_gap: f64,
    pub accepted: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BridgeOutcome {
    #[serde(with = "crate::serde_vector")]
    pub x: Vector,
    #[serde(with = "crate::serde_vector")]
    pub p: Vector,
    pub n: u64,
    pub gamma: f64,
    /// Derivative estimate on the enlarged body.
    pub estimate: f64,
    pub growth: GrowthReport,
    pub steps: Vec<BridgeStep>,
}

/// Chooses `γ < min(eps, ε̄)` with sampled `f(B(x̄;γ)) > f(x̄) − eps`, then
/// minimizes `f̂ + ψ_n` (f restricted to `B(x̄;γ)`, `ψ_n = n·dist(·, x̄ +
/// C(0;A))`) for `n = n0, 2n0, …` and returns the first `(x_n, p_n)` with
/// `x_n` inside the ball, `|f(x_n) − f(x̄)| < eps` and `inf p_n(A) > −eps`.
pub fn bridge_subgradient(
    f: &ScalarFunction,
    x_bar: &Vector,
    body: &ConvexBody,
    delta: f64,
    eps: f64,
) -> Result<(Vector, Vector)> {
    bridge_subgradient_with(f, x_bar, body, delta, eps, BridgeOptions::default())
        .map(|o| (o.x, o.p))
}

pub fn bridge_subgradient_with(
    f: &ScalarFunction,
    x_bar: &Vector,
    body: &ConvexBody,
    delta: f64,
    eps: f64,
    opts: BridgeOptions,
) -> Result<BridgeOutcome> {
    if !(delta > 0.0) || !(eps > 0.0) {
        return Err(Error::InvalidInput("delta and eps must be > 0".into()));
    }
    Error::check_dim(body.dim(), x_bar)?;
    let fx = f.value(x_bar);
    if !fx.is_finite() {
        return Err(Error::InfiniteBase);
    }
    let stats = cone_stats(body, DEFAULT_TOL)?;
    let enlarged = body.enlarge(delta)?;
    let est = multidir_derivative(f, x_bar, &enlarged, TSchedule::default(), opts.refinement)?;
    if !(est.estimate > 0.0) {
        return Err(Error::PreconditionFailed(format!(
            "derivative on the enlarged body is {} (needs > 0)",
            est.estimate
        )));
    }
    let growth = growth_bound(f, x_bar, &enlarged, est.estimate, opts.refinement)?;

    let mut gamma = eps.min(growth.eps_bar) / 2.0;
    let mut lsc_ok = false;
    for _ in 0..60 {
        let ball = ConvexBody::ball(x_bar.clone(), gamma)?;
        let low = sample_body(&ball, opts.refinement)
            .iter()
            .map(|y| f.value(y))
            .fold(f64::INFINITY, f64::min);
        if low > fx - eps {
            lsc_ok = true;
            break;
        }
        gamma /= 2.0;
    }
    if !lsc_ok {
        return Err(Error::PreconditionFailed(
            "no radius gives f(B(x;γ)) > f(x) − eps on the sample".into(),
        ));
    }

    let f_hat = f.clone().restricted(x_bar.clone(), gamma);
    let cone = Cone::from_directions(x_bar.clone(), body.clone());
    let a_samples = sample_body(body, opts.refinement);
    let mut steps = Vec::new();
    let mut n = opts.n0.max(1);
    while n <= opts.n_max {
        let psi = PenaltyFunction::new(n as f64, cone.clone());
        let step = match fuzzy_min_pair(&f_hat, &psi, 1.0 / n as f64, x_bar, gamma, opts.seed ^ n) {
            Ok(pair) => {
                let inside = (&pair.x - x_bar).norm() < gamma;
                let pairing = body.inf_linear(&pair.p);
                let pairing_lower = a_samples
                    .iter()
                    .map(|a| -pair.q.dot(a))
                    .fold(f64::INFINITY, f64::min)
                    - stats.s / n as f64;
                let value_gap = (pair.f_value - fx).abs();
                let accepted = inside && pairing > -eps && value_gap < eps;
                BridgeStep {
                    n,
                    inside,
                    pairing,
                    pairing_lower,
                    value_gap,
                    accepted,
                    note: None,
                    pair: Some(pair),
                }
            }
            Err(e @ Error::ToleranceNotMet { .. }) => BridgeStep {
                n,
                pair: None,
                inside: false,
                pairing: f64::NAN,
                pairing_lower: f64::NAN,
                value_gap: f64::NAN,
                accepted: false,
                note: Some(e.to_string()),
            },
            Err(e) => return Err(e),
        };
        let accepted = step.accepted;
        steps.push(step);
        if accepted {
            let pair = steps.last().and_then(|s| s.pair.clone()).expect("accepted step has a pair");
            return Ok(BridgeOutcome {
                x: pair.x,
                p: pair.p,
                n,
                gamma,
                estimate: est.estimate,
                growth,
                steps,
            });
        }
        n *= 2;
    }
    Err(Error::ClaimFailed { n_max: opts.n_max })
}

/// Growth bound at `λ = estimate/2`, lowering `λ` if the sampled check fails.
fn growth_bound(
    f: &ScalarFunction,
    x: &Vector,
    body: &ConvexBody,
    estimate: f64,
    refinement: usize,
) -> Result<GrowthReport> {
    let mut lambda = estimate / 2.0;
    let mut last = None;
    for _ in 0..8 {
        match check_growth(f, x, body, lambda, refinement) {
            Ok(g) => return Ok(g),
            Err(e @ Error::Violation { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
        lambda /= 4.0;
    }
    Err(last.expect("at least one attempt"))
}
