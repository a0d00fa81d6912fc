//! Convex bodies, multidirectional intervals, cones and the constants
//! `δ = inf‖A‖`, `L = sup‖A‖`, `c = δ/L` attached to a cone generator.

mod body;
mod cone;
pub mod hull;
mod interval;
pub mod sample;

use serde::{Deserialize, Serialize};

pub use body::{body_membership, enlarge, inf_linear, ConvexBody};
pub use cone::{cone_membership, dist_to_cone, Cone, ConeDistance};
pub use interval::{interval_membership, MultiInterval};

use crate::{Error, Result};

/// Norm bounds of a generator body with `0 ∉ A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeGeometryStats {
    /// `inf_{a∈A} ‖a‖`.
    pub delta: f64,
    /// `sup_{a∈A} ‖a‖`.
    pub l: f64,
    /// `δ/L`, the constant in `‖Σ xₖ‖ ≥ c Σ ‖xₖ‖` on `C(0;A)`.
    pub c: f64,
    /// Alias of `L` used for the growth constant `k = λ/s`.
    pub s: f64,
    /// A fixed value in `(0, δ)`: `δ/2`.
    pub mu: f64,
}

/// Fails with [`Error::ZeroInBody`] when `dist(0, A) ≤ tol`.
pub fn cone_stats(body: &ConvexBody, tol: f64) -> Result<ConeGeometryStats> {
    let delta = body.inf_norm();
    if delta <= tol {
        return Err(Error::ZeroInBody { distance: delta });
    }
    let l = body.sup_norm();
    Ok(ConeGeometryStats {
        delta,
        l,
        c: delta / l,
        s: l,
        mu: delta / 2.0,
    })
}

/// Named test bodies in `ℝᵈ` (`d ≥ 2`), all away from the origin.
pub fn standard_bodies(dim: usize) -> Vec<(&'static str, ConvexBody)> {
    let pt = |c: &[f64]| crate::Vector::from_fn(dim, |i, _| c.get(i).copied().unwrap_or(0.0));
    let poly = |vs: &[&[f64]]| ConvexBody::Polytope {
        vertices: vs.iter().map(|v| pt(v)).collect(),
    };
    vec![
        ("segment", poly(&[&[2.0, -1.0], &[2.0, 1.0]])),
        ("triangle", poly(&[&[1.0, 1.0], &[2.0, 0.0], &[1.0, -1.0]])),
        (
            "ball",
            ConvexBody::Ball {
                center: pt(&[3.0]),
                radius: 1.0,
            },
        ),
        (
            "fat-segment",
            ConvexBody::Enlargement {
                base: Box::new(poly(&[&[2.0, 0.0], &[2.0, 1.0]])),
                eps: 0.25,
            },
        ),
    ]
}
