use super::hull::nnls;
use super::ConvexBody;
use crate::{Error, NormKind, Result, Vector};

/// `C(a;A) = {a + t(x − a) : t ≥ 0, x ∈ A}`, stored as the apex together with
/// the direction body `A − a`, so that `C(a;A) = {a} + C(0; A − a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cone {
    apex: Vector,
    directions: ConvexBody,
    generators: Option<Vec<Vector>>,
}

/// Result of a cone distance query.
#[derive(Clone, Debug)]
pub struct ConeDistance {
    pub distance: f64,
    /// Nearest point of the cone found by the search.
    pub projection: Vector,
    /// The ray parameter `t` of the projection (`projection ∈ apex + t·(A−a)`).
    pub scale: f64,
    /// False when `0 ∈ A − a` forced the fixed fallback search range.
    pub bracketed: bool,
}

const GOLDEN_REL_TOL: f64 = 1e-13;
const FALLBACK_T_MAX: f64 = 1e6;

impl Cone {
    /// `C(apex; generator)`.
    pub fn new(apex: Vector, generator: &ConvexBody) -> Result<Self> {
        Error::check_dim(generator.dim(), &apex)?;
        let directions = generator.translate(&-&apex);
        Ok(Self::from_directions(apex, directions))
    }

    /// `{apex} + C(0; directions)`.
    pub fn from_directions(apex: Vector, directions: ConvexBody) -> Self {
        let generators = if directions.space().norm_kind() == NormKind::Euclidean {
            directions.polyhedral_vertices()
        } else {
            None
        };
        Cone {
            apex,
            directions,
            generators,
        }
    }

    pub fn apex(&self) -> &Vector {
        &self.apex
    }

    /// The body `A − a` generating the translated cone `C(0; A − a)`.
    pub fn directions(&self) -> &ConvexBody {
        &self.directions
    }

    pub fn generator(&self) -> ConvexBody {
        self.directions.translate(&self.apex)
    }

    pub fn dim(&self) -> usize {
        self.apex.len()
    }

    /// `C(0; A − a)`.
    pub fn at_origin(&self) -> Cone {
        Cone {
            apex: Vector::zeros(self.dim()),
            directions: self.directions.clone(),
            generators: self.generators.clone(),
        }
    }

    /// Distance from `x` to the cone in the ambient norm.
    ///
    /// Polyhedral Euclidean cones are handled exactly by nonnegative least
    /// squares; otherwise `t ↦ dist(x − a, t(A − a))` is convex and is
    /// minimized by golden-section search on `[0, T_max]`.
    pub fn distance(&self, x: &Vector) -> ConeDistance {
        let z = x - &self.apex;
        if let Some(g) = &self.generators {
            let c = nnls(g, &z);
            let distance = (&z - &c.point).norm();
            return ConeDistance {
                distance,
                projection: &self.apex + &c.point,
                scale: c.coefficients.iter().sum(),
                bracketed: true,
            };
        }
        self.golden_distance(&z, None)
    }

    fn golden_distance(&self, z: &Vector, stop_below: Option<f64>) -> ConeDistance {
        let space = self.directions.space();
        let z_norm = space.norm(z);
        let origin = ConeDistance {
            distance: z_norm,
            projection: self.apex.clone(),
            scale: 0.0,
            bracketed: true,
        };
        if z_norm == 0.0 || stop_below.is_some_and(|s| z_norm <= s) {
            return origin;
        }
        let delta = self.directions.inf_norm();
        let (t_max, bracketed) = if delta > 1e-12 {
            (2.0 * z_norm / delta + 1.0, true)
        } else {
            (FALLBACK_T_MAX * (1.0 + z_norm), false)
        };

        let eval = |t: f64| -> (f64, Vector) {
            if t <= 0.0 {
                return (z_norm, Vector::zeros(z.len()));
            }
            let (p, d) = self.directions.project(&(z / t));
            (t * d, p * t)
        };

        let mut best = (0.0, z_norm, Vector::zeros(z.len()));
        let consider = |t: f64, v: f64, p: Vector, best: &mut (f64, f64, Vector)| {
            if v < best.1 {
                *best = (t, v, p);
            }
        };
        let (v_hi, p_hi) = eval(t_max);
        consider(t_max, v_hi, p_hi, &mut best);

        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut lo, mut hi) = (0.0, t_max);
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let (mut f1, p1) = eval(x1);
        let (mut f2, p2) = eval(x2);
        consider(x1, f1, p1, &mut best);
        consider(x2, f2, p2, &mut best);
        while hi - lo > GOLDEN_REL_TOL * t_max.max(1.0) {
            if stop_below.is_some_and(|s| best.1 <= s) {
                break;
            }
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                let (f, p) = eval(x1);
                f1 = f;
                consider(x1, f, p, &mut best);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                let (f, p) = eval(x2);
                f2 = f;
                consider(x2, f, p, &mut best);
            }
        }
        ConeDistance {
            distance: best.1,
            projection: &self.apex + best.2,
            scale: best.0,
            bracketed,
        }
    }

    /// Like [`Cone::distance`] but fails when the search range could not be
    /// bracketed (`0 ∈ A − a`, non-polyhedral).
    pub fn checked_distance(&self, x: &Vector) -> Result<ConeDistance> {
        let d = self.distance(x);
        if d.bracketed {
            Ok(d)
        } else {
            Err(Error::UnboundedSearch)
        }
    }

    /// `dist(x, cone) ≤ tol`.
    ///
    /// For lifted polyhedral cones the Euclidean residual is used, which
    /// dominates the max-norm distance, so the test never over-accepts.
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        let z = x - &self.apex;
        if let Some(g) = &self.generators {
            let c = nnls(g, &z);
            return (&z - &c.point).norm() <= tol;
        }
        if let Some(g) = self.directions.polyhedral_vertices() {
            let c = nnls(&g, &z);
            if (&z - &c.point).norm() <= tol {
                return true;
            }
        }
        self.golden_distance(&z, Some(tol)).distance <= tol
    }
}

/// `dist(x, C)`.
pub fn dist_to_cone(x: &Vector, cone: &Cone) -> f64 {
    cone.distance(x).distance
}

/// `dist(x, C) ≤ tol`.
pub fn cone_membership(cone: &Cone, x: &Vector, tol: f64) -> bool {
    cone.contains(x, tol)
}
