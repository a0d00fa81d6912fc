//! Extended-real functions with subgradient oracles.
//!
//! Two oracle kinds are supported: the gradient of a smooth function and the
//! exact convex subdifferential of a max-of-affine function (given by its
//! active pieces). Sums, ball restrictions and liftings `f(x) − κt` compose
//! them.

mod axioms;
mod catalog;
mod function;
mod infimum;

use serde::{Deserialize, Serialize};

pub use axioms::{check_p3_p4, AxiomReport};
pub use catalog::{catalog, catalog_all, CatalogEntry, CATALOG_NAMES};
pub use function::{lift, AffinePiece, LiftedProblem, ScalarFunction};
pub use infimum::{argmin_over_body, argmin_over_points, inf_over_body, inf_over_body_with};

use crate::geometry::hull::{min_norm_point, HullPoint};
use crate::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Gradient,
    ConvexMaxAffine,
    None,
}

/// A subdifferential given as the convex hull of finitely many covectors.
/// Empty means `∂f(x) = ∅`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Subdifferential {
    pub generators: Vec<Vector>,
}

impl Subdifferential {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn singleton(p: Vector) -> Self {
        Subdifferential {
            generators: vec![p],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// The element of least Euclidean norm.
    pub fn min_norm(&self) -> Option<HullPoint> {
        (!self.is_empty()).then(|| min_norm_point(&self.generators))
    }

    /// Euclidean distance from `q` to the hull.
    pub fn distance_to(&self, q: &Vector) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        let shifted: Vec<Vector> = self.generators.iter().map(|g| g - q).collect();
        min_norm_point(&shifted).point.norm()
    }

    /// `{g + h}` over all generator pairs: the hull of the Minkowski sum.
    pub fn minkowski_sum(&self, other: &Subdifferential) -> Subdifferential {
        let mut generators = Vec::with_capacity(self.generators.len() * other.generators.len());
        for g in &self.generators {
            for h in &other.generators {
                generators.push(g + h);
            }
        }
        Subdifferential { generators }
    }
}

/// Anything with values and a subgradient oracle.
pub trait Objective: Sync {
    fn value(&self, x: &Vector) -> f64;

    fn subdifferential(&self, x: &Vector) -> Subdifferential;

    /// Whether `q ∈ ∂f(x)` up to `tol`.
    fn contains_subgradient(&self, x: &Vector, q: &Vector, tol: f64) -> bool {
        self.subdifferential(x).distance_to(q) <= tol
    }
}
