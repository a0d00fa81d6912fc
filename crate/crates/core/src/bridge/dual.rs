use serde::Serialize;

use super::{bridge_subgradient_with, BridgeOptions, BridgeOutcome};
use crate::geometry::MultiInterval;
use crate::oracles::{inf_over_body, lift};
use crate::witness::lagrange_witness;
use crate::{ConvexBody, Error, Objective, Result, ScalarFunction, Vector};

/// Halvings tried for each parameter search.
const MAX_HALVINGS: usize = 40;
/// Probes of `r < inf f(A_δ)`: `δ = 1, 1/2, …, 2⁻²⁰`.
const PROBE_HALVINGS: i32 = 20;

/// The constants of the dual construction. Every inequality they must
/// satisfy is re-evaluated by [`DualCliParams::checks`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualCliParams {
    pub eps: f64,
    pub r: f64,
    pub f_a: f64,
    /// Best probed `(δ, inf f(A_δ))` for the hypothesis.
    pub probe: (f64, f64),
    pub delta1: f64,
    /// Sampled `inf f(A_{δ₁})`.
    pub inf_f_delta1: f64,
    pub r1: f64,
    /// `κ = r₁ − f(a)`, the slope of the lifted function.
    pub kappa: f64,
    pub delta: f64,
    /// `Δ = max{κ(1 − δ), κ(1 + δ)}`.
    pub big_delta: f64,
    /// Sampled `inf f̃(Ã_δ)`.
    pub inf_lifted: f64,
    pub r_prime: f64,
}

impl DualCliParams {
    pub fn construct(
        f: &ScalarFunction,
        a: &Vector,
        body: &ConvexBody,
        r: f64,
        eps: f64,
        grid: usize,
    ) -> Result<Self> {
        let f_a = f.value(a);
        if !f_a.is_finite() {
            return Err(Error::InfiniteBase);
        }
        let inf_at = |d: f64| -> Result<f64> { inf_over_body(f, &body.enlarge(d)?, grid) };

        let mut probe = (f64::NAN, f64::NEG_INFINITY);
        for k in 0..=PROBE_HALVINGS {
            let d = 2f64.powi(-k);
            let v = inf_at(d)?;
            if v > probe.1 {
                probe = (d, v);
            }
        }
        if !(r < probe.1) {
            return Err(Error::ConditionFailed(format!(
                "r = {r} is not below inf f(A_δ) for any probed δ (best {})",
                probe.1
            )));
        }

        let mut delta1 = eps / 8.0;
        let mut inf_f_delta1 = inf_at(delta1)?;
        let mut tries = 0;
        while !(r + 2.0 * delta1 < inf_f_delta1) {
            tries += 1;
            if tries > MAX_HALVINGS {
                return Err(Error::ConditionFailed(
                    "no δ₁ with r + 2δ₁ < inf f(A_δ₁)".into(),
                ));
            }
            delta1 /= 2.0;
            inf_f_delta1 = inf_at(delta1)?;
        }
        let r1 = r + delta1;
        let kappa = r1 - f_a;

        let mut delta = delta1 / 2.0;
        let mut tries = 0;
        while !(delta * kappa.abs() < delta1 && 2.0 * delta * kappa.abs() < eps / 4.0) {
            tries += 1;
            if tries > MAX_HALVINGS {
                return Err(Error::ConditionFailed("no admissible δ".into()));
            }
            delta /= 2.0;
        }
        let big_delta = (kappa * (1.0 - delta)).max(kappa * (1.0 + delta));

        let lp = lift(f, kappa);
        let lifted_body = lp.lift_body_enlarged(body, delta)?;
        let inf_lifted = inf_over_body(&lp.function, &lifted_body, grid)?;
        if !(inf_lifted > f_a) {
            return Err(Error::ConditionFailed(format!(
                "inf f̃(Ã_δ) = {inf_lifted} does not exceed f(a) = {f_a}"
            )));
        }
        let r_prime = 0.5 * (f_a + (f_a + delta).min(inf_lifted));
        let params = DualCliParams {
            eps,
            r,
            f_a,
            probe,
            delta1,
            inf_f_delta1,
            r1,
            kappa,
            delta,
            big_delta,
            inf_lifted,
            r_prime,
        };
        if let Some((name, _)) = params.checks().into_iter().find(|(_, ok)| !ok) {
            return Err(Error::ConditionFailed(format!("parameter check failed: {name}")));
        }
        Ok(params)
    }

    /// Each defining inequality, re-evaluated.
    pub fn checks(&self) -> Vec<(&'static str, bool)> {
        let k = self.kappa;
        vec![
            ("4δ₁ < ε", 4.0 * self.delta1 < self.eps),
            ("r + 2δ₁ < inf f(A_δ₁)", self.r + 2.0 * self.delta1 < self.inf_f_delta1),
            ("r₁ = r + δ₁", self.r1 == self.r + self.delta1),
            ("0 < δ < δ₁", 0.0 < self.delta && self.delta < self.delta1),
            ("Δ < r₁ − f(a) + δ₁", self.big_delta < k + self.delta1),
            ("2δ|r₁ − f(a)| < ε/4", 2.0 * self.delta * k.abs() < self.eps / 4.0),
            ("inf f̃(Ã_δ) > f(a)", self.inf_lifted > self.f_a),
            ("f(a) < r′", self.f_a < self.r_prime),
            ("r′ < inf f̃(Ã_δ)", self.r_prime < self.inf_lifted),
            ("r′ < f(a) + δ", self.r_prime < self.f_a + self.delta),
        ]
    }
}

/// The lifted primal witness `(x̄, t̄)` used by the dual construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LagrangeSummary {
    #[serde(with = "crate::serde_vector")]
    pub witness: Vector,
    pub value: f64,
    pub derivative: f64,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualWitnessReport {
    #[serde(with = "crate::serde_vector")]
    pub xi: Vector,
    /// The `t`-coordinate `s` of the lifted bridge point `(ξ, s)`.
    pub s: f64,
    #[serde(with = "crate::serde_vector")]
    pub p: Vector,
    /// Slope part of the lifted subgradient, `f(a) − r₁`.
    pub sigma: f64,
    pub f_at_xi: f64,
    pub f_at_apex: f64,
    pub r: f64,
    pub eps: f64,
    pub params: DualCliParams,
    pub lagrange: LagrangeSummary,
    /// `dist(ξ, [a,A])`.
    pub interval_distance: f64,
    pub membership: bool,
    /// `max{f(a), r} + ε − f(ξ)`.
    pub value_slack: f64,
    pub value_bound: bool,
    /// `inf p(A) − p·a`.
    pub pairing: f64,
    pub pairing_bound: bool,
    /// `inf (p, σ)(Ã − ã)`.
    pub lifted_pairing: f64,
    pub lifted_pairing_ok: bool,
    pub bridge: BridgeOutcome,
    pub verified: bool,
}

/// Witness `ξ ∈ [a,A]_ε`, `p ∈ ∂f(ξ)` with `f(ξ) < max{f(a), r} + ε` and
/// `inf p(A) − p·a > r − f(a)`, for `r` below `inf f(A_δ)` for some `δ > 0`.
pub fn clarke_ledyaev_dual(
    f: &ScalarFunction,
    a: &Vector,
    body: &ConvexBody,
    r: f64,
    eps: f64,
    grid: usize,
    seed: u64,
) -> Result<DualWitnessReport> {
    Error::check_dim(body.dim(), a)?;
    if !(eps > 0.0) || grid == 0 {
        return Err(Error::InvalidInput("eps must be > 0 and grid positive".into()));
    }
    // the construction assumes ε < 1; a smaller ε only strengthens the result
    let eps_work = eps.min(0.5);
    let params = DualCliParams::construct(f, a, body, r, eps_work, grid)?;
    let delta = params.delta;
    let lp = lift(f, params.kappa);
    let a_lift = lp.lift_point(a);
    let lifted_body = lp.lift_body_enlarged(body, delta)?;

    let inner_tol = (params.r_prime - params.f_a) / 4.0;
    let lw = lagrange_witness(&lp.function, &a_lift, &lifted_body, params.r_prime, grid, inner_tol)?;
    let lagrange = LagrangeSummary {
        witness: lw.witness.clone(),
        value: lw.f_at_witness,
        derivative: lw.derivative.estimate,
        verified: lw.verified,
    };

    // bridge on Ã − ã with enlargement δ, whose enlargement is Ã_δ − ã
    let rel_body = lp.lift_body(&body.translate(&-a))?;
    let opts = BridgeOptions {
        refinement: grid,
        seed,
        ..BridgeOptions::default()
    };
    let bridge = bridge_subgradient_with(&lp.function, &lw.witness, &rel_body, delta, delta, opts)?;

    let n = a.len();
    let xi = bridge.x.rows(0, n).into_owned();
    let s = bridge.x[n];
    let p = bridge.p.rows(0, n).into_owned();
    let sigma = bridge.p[n];
    let lifted_pairing = rel_body.inf_linear(&bridge.p);

    // independent checks of the conclusions
    let f_at_xi = f.value(&xi);
    let interval_distance = MultiInterval::new(a.clone(), body.clone())?.distance(&xi);
    let membership = interval_distance < eps;
    let value_slack = params.f_a.max(r) + eps - f_at_xi;
    let value_bound = value_slack > 0.0;
    let pairing = body.inf_linear(&p) - p.dot(a);
    let pairing_bound = pairing > r - params.f_a;
    let lifted_pairing_ok = lifted_pairing > -delta;
    let subgradient_ok = f.contains_subgradient(&xi, &p, 1e-9);
    Ok(DualWitnessReport {
        verified: membership && value_bound && pairing_bound && lifted_pairing_ok && subgradient_ok,
        xi,
        s,
        p,
        sigma,
        f_at_xi,
        f_at_apex: params.f_a,
        r,
        eps,
        lagrange,
        interval_distance,
        membership,
        value_slack,
        value_bound,
        pairing,
        pairing_bound,
        lifted_pairing,
        lifted_pairing_ok,
        bridge,
        params,
    })
}
