use super::hull::min_norm_point;
use super::ConvexBody;
use crate::{Error, NormKind, Result, Vector};

/// The multidirectional interval `[a,A] = {a + t(x − a) : t ∈ [0,1], x ∈ A}`,
/// which for convex `A` is the convex hull of `{a} ∪ A`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiInterval {
    apex: Vector,
    body: ConvexBody,
    directions: ConvexBody,
}

impl MultiInterval {
    pub fn new(apex: Vector, body: ConvexBody) -> Result<Self> {
        Error::check_dim(body.dim(), &apex)?;
        let directions = body.translate(&-&apex);
        Ok(MultiInterval {
            apex,
            body,
            directions,
        })
    }

    pub fn apex(&self) -> &Vector {
        &self.apex
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    /// `a + t(y − a)`.
    pub fn point(&self, t: f64, y: &Vector) -> Vector {
        &self.apex + (y - &self.apex) * t
    }

    pub fn distance(&self, x: &Vector) -> f64 {
        let z = x - &self.apex;
        if self.directions.space().norm_kind() == NormKind::Euclidean {
            if let Some(mut pts) = self.directions.polyhedral_vertices() {
                pts.push(Vector::zeros(z.len()));
                let shifted: Vec<Vector> = pts.iter().map(|p| p - &z).collect();
                return min_norm_point(&shifted).point.norm();
            }
        }
        let space = self.directions.space();
        let z_norm = space.norm(&z);
        if z_norm == 0.0 {
            return 0.0;
        }
        let eval = |t: f64| {
            if t <= 0.0 {
                z_norm
            } else {
                t * self.directions.distance(&(&z / t))
            }
        };
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut best = z_norm.min(eval(1.0));
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let mut f1 = eval(x1);
        let mut f2 = eval(x2);
        best = best.min(f1).min(f2);
        while hi - lo > 1e-13 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = eval(x1);
                best = best.min(f1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = eval(x2);
                best = best.min(f2);
            }
        }
        best
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.distance(x) <= tol
    }
}

/// Membership in `[a,A]` up to `tol`.
pub fn interval_membership(iv: &MultiInterval, x: &Vector, tol: f64) -> bool {
    iv.contains(x, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_row_slice(x)
    }

    #[test]
    fn segment_interval() {
        let a = ConvexBody::polytope_from(&[&[1.0, 0.0]]).unwrap();
        let iv = MultiInterval::new(v(&[0.0, 0.0]), a).unwrap();
        assert!(interval_membership(&iv, &v(&[0.5, 0.0]), 1e-9));
        assert!(!interval_membership(&iv, &v(&[1.5, 0.0]), 1e-9));
    }

    #[test]
    fn triangle_interval_matches_grid_sweep() {
        let a = ConvexBody::polytope_from(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let iv = MultiInterval::new(v(&[0.0, 0.0]), a).unwrap();
        let x = v(&[0.25, 0.25]);
        assert!(interval_membership(&iv, &x, 1e-9));
        // explicit witness t = 0.5, y = (0.5, 0.5)
        assert!((iv.point(0.5, &v(&[0.5, 0.5])) - &x).norm() < 1e-15);
        let mut found = false;
        for i in 0..=100 {
            for j in 0..=100 {
                let (t, w) = (i as f64 / 100.0, j as f64 / 100.0);
                let p = iv.point(t, &v(&[1.0 - w, w]));
                found |= (p - &x).norm() < 1e-12;
            }
        }
        assert!(found);
    }

    #[test]
    fn golden_path_agrees_with_hull_path() {
        let a = ConvexBody::polytope_from(&[&[2.0, -1.0], &[2.0, 1.0]]).unwrap();
        let hull = MultiInterval::new(v(&[0.0, 0.0]), a.clone()).unwrap();
        // a zero-radius enlargement forces the golden path
        let e = ConvexBody::Enlargement {
            base: Box::new(a),
            eps: 0.0,
        };
        let golden = MultiInterval::new(v(&[0.0, 0.0]), e).unwrap();
        for p in [[3.0, 0.0], [1.0, 2.0], [-1.0, 0.5], [1.0, 0.2]] {
            let x = v(&p);
            assert!((hull.distance(&x) - golden.distance(&x)).abs() < 1e-9, "{p:?}");
        }
    }
}
