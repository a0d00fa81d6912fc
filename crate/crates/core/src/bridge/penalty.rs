use crate::geometry::Cone;
use crate::oracles::{Objective, Subdifferential};
use crate::{NormKind, Space, Vector};

/// `ψ_n(x) = n·dist(x, x̄ + C(0;A))`.
#[derive(Clone, Debug)]
pub struct PenaltyFunction {
    pub n: f64,
    pub cone: Cone,
}

/// Relative distance below which a point counts as on the cone.
const ON_CONE: f64 = 1e-12;

impl PenaltyFunction {
    pub fn new(n: f64, cone: Cone) -> Self {
        PenaltyFunction { n, cone }
    }

    fn space(&self) -> Space {
        self.cone.directions().space()
    }

    fn on_cone(&self, x: &Vector, d: f64) -> bool {
        d <= ON_CONE * (1.0 + self.space().norm(&(x - self.cone.apex())))
    }

    /// Central differences; used off the cone in the max-norm spaces.
    fn numerical_gradient(&self, x: &Vector) -> Vector {
        let h = 1e-7 * (1.0 + x.amax());
        Vector::from_fn(x.len(), |i, _| {
            let mut up = x.clone();
            let mut dn = x.clone();
            up[i] += h;
            dn[i] -= h;
            (self.value(&up) - self.value(&dn)) / (2.0 * h)
        })
    }
}

impl Objective for PenaltyFunction {
    fn value(&self, x: &Vector) -> f64 {
        self.n * self.cone.distance(x).distance
    }

    /// Off the cone: the gradient (Euclidean: `n(x − π)/d`). On the cone the
    /// set `n·(B* ∩ N(x))` is not a finite hull; `{0}` is returned as a
    /// member and [`Objective::contains_subgradient`] tests the whole set.
    fn subdifferential(&self, x: &Vector) -> Subdifferential {
        let cd = self.cone.distance(x);
        if self.on_cone(x, cd.distance) {
            return Subdifferential::singleton(Vector::zeros(x.len()));
        }
        let g = match self.space().norm_kind() {
            NormKind::Euclidean => (x - &cd.projection) * (self.n / cd.distance),
            NormKind::Sup => self.numerical_gradient(x),
        };
        Subdifferential::singleton(g)
    }

    /// On the cone `q ∈ ∂ψ_n(x)` iff `‖q‖* ≤ n`, `sup q(A) ≤ 0` and
    /// `q·(x − x̄) = 0`.
    fn contains_subgradient(&self, x: &Vector, q: &Vector, tol: f64) -> bool {
        let cd = self.cone.distance(x);
        if self.on_cone(x, cd.distance) {
            let rel = x - self.cone.apex();
            return self.space().dual_norm(q) <= self.n + tol
                && self.cone.directions().sup_linear(q) <= tol
                && q.dot(&rel).abs() <= tol * (1.0 + rel.norm());
        }
        self.subdifferential(x).distance_to(q) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ConvexBody;

    fn v(x: &[f64]) -> Vector {
        Vector::from_row_slice(x)
    }

    fn ray_penalty(n: f64) -> PenaltyFunction {
        let d = ConvexBody::polytope_from(&[&[1.0, 0.0]]).unwrap();
        PenaltyFunction::new(n, Cone::from_directions(v(&[0.0, 0.0]), d))
    }

    #[test]
    fn values_on_a_ray() {
        let psi = ray_penalty(3.0);
        assert_eq!(psi.value(&v(&[5.0, 0.0])), 0.0);
        assert!((psi.value(&v(&[2.0, 1.0])) - 3.0).abs() < 1e-12);
        assert!((psi.value(&v(&[-3.0, -4.0])) - 15.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_off_the_cone() {
        let psi = ray_penalty(2.0);
        let s = psi.subdifferential(&v(&[1.0, 0.5]));
        assert!((&s.generators[0] - v(&[0.0, 2.0])).norm() < 1e-12);
    }

    #[test]
    fn normal_cone_at_the_apex() {
        let psi = ray_penalty(2.0);
        let o = v(&[0.0, 0.0]);
        assert!(psi.contains_subgradient(&o, &v(&[-1.0, 1.0]), 1e-12));
        assert!(!psi.contains_subgradient(&o, &v(&[0.5, 0.0]), 1e-12));
        assert!(!psi.contains_subgradient(&o, &v(&[-1.0, 2.0]), 1e-12));
        // on the ray away from the apex only q ⟂ ray
        assert!(psi.contains_subgradient(&v(&[1.0, 0.0]), &v(&[0.0, -2.0]), 1e-12));
        assert!(!psi.contains_subgradient(&v(&[1.0, 0.0]), &v(&[-1.0, 0.0]), 1e-12));
    }

    #[test]
    fn sup_norm_gradient_by_differences() {
        let d = ConvexBody::product(ConvexBody::polytope_from(&[&[1.0, 0.0]]).unwrap(), 1.0, 1.0).unwrap();
        let psi = PenaltyFunction::new(1.0, Cone::from_directions(Vector::zeros(3), d));
        // (1, 2, 1): nearest cone point (1,0,1), max-norm distance 2 along the y-axis
        let x = v(&[1.0, 2.0, 1.0]);
        assert!((psi.value(&x) - 2.0).abs() < 1e-9);
        let g = &psi.subdifferential(&x).generators[0];
        assert!((g[1] - 1.0).abs() < 1e-4, "{g:?}");
    }
}
