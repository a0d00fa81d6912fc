use serde::Serialize;

use super::{Objective, OracleKind, ScalarFunction};
use crate::{Error, Result, Vector};

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AxiomReport {
    /// Subgradient inequalities checked for the convex-case axiom.
    pub p3_checks: usize,
    /// Minimizers at which `0 ∈ ∂f` was confirmed.
    pub p4_checks: usize,
    /// Whether the convex-case axiom applied.
    pub convex: bool,
}

/// Check the convex-case and minimizer axioms of the oracle on the given
/// probes. For convex `f` every returned generator `g` at a probe `x` must
/// satisfy `f(y) ≥ f(x) + g·(y − x)` at all probes `y` and at `x ± e_i`.
/// At each listed local minimizer `0` must lie in the returned set.
pub fn check_p3_p4(
    f: &ScalarFunction,
    probes: &[Vector],
    minimizers: &[Vector],
    tol: f64,
) -> Result<AxiomReport> {
    if f.oracle_kind() == OracleKind::None {
        return Err(Error::PreconditionFailed(
            "function has no subgradient oracle".into(),
        ));
    }
    let mut report = AxiomReport {
        convex: f.is_convex(),
        ..Default::default()
    };
    if report.convex {
        let mut tests: Vec<Vector> = probes.to_vec();
        for x in probes {
            for i in 0..x.len() {
                for h in [-1.0, 1.0] {
                    let mut y = x.clone();
                    y[i] += h;
                    tests.push(y);
                }
            }
        }
        for x in probes {
            let fx = f.value(x);
            if !fx.is_finite() {
                continue;
            }
            for g in &f.subdifferential(x).generators {
                for y in &tests {
                    let fy = f.value(y);
                    let gap = fy - fx - g.dot(&(y - x));
                    if gap < -tol {
                        return Err(Error::AxiomViolation {
                            axiom: "P3",
                            probe: x.iter().copied().collect(),
                            detail: format!("subgradient inequality fails by {} at {:?}", -gap, y.as_slice()),
                        });
                    }
                    report.p3_checks += 1;
                }
            }
        }
    }
    for x in minimizers {
        let s = f.subdifferential(x);
        let d = s.distance_to(&Vector::zeros(x.len()));
        if d > tol {
            return Err(Error::AxiomViolation {
                axiom: "P4",
                probe: x.iter().copied().collect(),
                detail: format!("distance from 0 to the oracle set is {d}"),
            });
        }
        report.p4_checks += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::catalog_all;

    #[test]
    fn catalog_satisfies_axioms() {
        for dim in [2, 3] {
            let probes: Vec<Vector> = (0..30)
                .map(|k| Vector::from_fn(dim, |i, _| ((k * 7 + i * 3) % 11) as f64 / 2.0 - 2.5))
                .collect();
            for e in catalog_all(dim) {
                check_p3_p4(&e.function, &probes, &e.local_minimizers, 1e-9)
                    .unwrap_or_else(|err| panic!("{}: {err}", e.name));
            }
        }
    }

    #[test]
    fn wrong_oracle_is_caught() {
        // 0 is not a minimizer of x ↦ −x
        let f = ScalarFunction::max_affine(vec![(Vector::from_row_slice(&[-1.0]), 0.0)]);
        let bad = ScalarFunction::sum(vec![f, ScalarFunction::constant(0.0)]);
        assert!(check_p3_p4(&bad, &[Vector::from_row_slice(&[0.0])], &[], 1e-9).is_ok());
        let wrong_min = Vector::from_row_slice(&[0.0]);
        assert!(matches!(
            check_p3_p4(&bad, &[], &[wrong_min], 1e-9),
            Err(Error::AxiomViolation { axiom: "P4", .. })
        ));
    }
}
