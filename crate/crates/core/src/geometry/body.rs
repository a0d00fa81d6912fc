use serde::{Deserialize, Serialize};

use super::hull::min_norm_point;
use crate::{serde_vector, serde_vectors, Error, Result, Space, Vector};

/// A nonempty closed bounded convex set.
///
/// `Product` is the lifted body `B × [lo, hi]` in `X × ℝ` under the max norm;
/// it is how `A × {1}` and `A_δ × [1−δ, 1+δ]` are represented. The other
/// variants live in a Euclidean space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConvexBody {
    Polytope {
        #[serde(with = "serde_vectors")]
        vertices: Vec<Vector>,
    },
    Ball {
        #[serde(with = "serde_vector")]
        center: Vector,
        radius: f64,
    },
    Enlargement {
        base: Box<ConvexBody>,
        eps: f64,
    },
    Product {
        base: Box<ConvexBody>,
        lo: f64,
        hi: f64,
    },
}

impl ConvexBody {
    pub fn polytope(vertices: Vec<Vector>) -> Result<Self> {
        let body = ConvexBody::Polytope { vertices };
        body.validate()?;
        Ok(body)
    }

    /// Shorthand for tests and examples: vertices given as slices.
    pub fn polytope_from(vertices: &[&[f64]]) -> Result<Self> {
        Self::polytope(vertices.iter().map(|v| Vector::from_row_slice(v)).collect())
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        let body = ConvexBody::Ball { center, radius };
        body.validate()?;
        Ok(body)
    }

    /// `B × [lo, hi]` in the lifted space.
    pub fn product(base: ConvexBody, lo: f64, hi: f64) -> Result<Self> {
        let body = ConvexBody::Product {
            base: Box::new(base),
            lo,
            hi,
        };
        body.validate()?;
        Ok(body)
    }

    /// `A_ε = A + ε B_X`. Lifted products enlarge coordinate-wise, which is
    /// exact under the max norm.
    pub fn enlarge(&self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidInput(format!("enlargement eps must be > 0, got {eps}")));
        }
        Ok(match self {
            ConvexBody::Product { base, lo, hi } => ConvexBody::Product {
                base: Box::new(base.enlarge(eps)?),
                lo: lo - eps,
                hi: hi + eps,
            },
            ConvexBody::Enlargement { base, eps: e } => ConvexBody::Enlargement {
                base: base.clone(),
                eps: e + eps,
            },
            other => ConvexBody::Enlargement {
                base: Box::new(other.clone()),
                eps,
            },
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexBody::Polytope { vertices } => {
                let first = vertices
                    .first()
                    .ok_or_else(|| Error::InvalidInput("polytope without vertices".into()))?;
                if first.is_empty() {
                    return Err(Error::InvalidInput("zero-dimensional vertex".into()));
                }
                for v in vertices {
                    Error::check_dim(first.len(), v)?;
                    if v.iter().any(|c| !c.is_finite()) {
                        return Err(Error::InvalidInput("non-finite vertex".into()));
                    }
                }
            }
            ConvexBody::Ball { center, radius } => {
                if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidInput("bad ball center".into()));
                }
                if !(*radius >= 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidInput(format!("ball radius must be >= 0, got {radius}")));
                }
            }
            ConvexBody::Enlargement { base, eps } => {
                if !(*eps >= 0.0 && eps.is_finite()) {
                    return Err(Error::InvalidInput(format!("enlargement eps must be >= 0, got {eps}")));
                }
                if matches!(**base, ConvexBody::Product { .. }) {
                    return Err(Error::InvalidInput(
                        "enlarge a product by enlarging its factors".into(),
                    ));
                }
                base.validate()?;
            }
            ConvexBody::Product { base, lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(Error::InvalidInput(format!("bad product interval [{lo}, {hi}]")));
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Polytope { vertices } => vertices[0].len(),
            ConvexBody::Ball { center, .. } => center.len(),
            ConvexBody::Enlargement { base, .. } => base.dim(),
            ConvexBody::Product { base, .. } => base.dim() + 1,
        }
    }

    pub fn space(&self) -> Space {
        match self {
            ConvexBody::Product { base, .. } => base.space().lifted(),
            ConvexBody::Enlargement { base, .. } => base.space(),
            _ => Space::euclidean(self.dim()),
        }
    }

    /// Nearest point and distance, in the body's own norm.
    pub fn project(&self, x: &Vector) -> (Vector, f64) {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            ConvexBody::Polytope { vertices } => {
                let shifted: Vec<Vector> = vertices.iter().map(|v| v - x).collect();
                let h = min_norm_point(&shifted);
                let d = h.point.norm();
                (x + h.point, d)
            }
            ConvexBody::Ball { center, radius } => {
                let diff = x - center;
                let d = diff.norm();
                if d <= *radius {
                    (x.clone(), 0.0)
                } else {
                    (center + diff * (radius / d), d - radius)
                }
            }
            ConvexBody::Enlargement { base, eps } => {
                let (p, d) = base.project(x);
                if d <= *eps {
                    (x.clone(), 0.0)
                } else {
                    (&p + (x - &p) * (eps / d), d - eps)
                }
            }
            ConvexBody::Product { base, lo, hi } => {
                let n = base.dim();
                let y = x.rows(0, n).into_owned();
                let (py, dy) = base.project(&y);
                let t = x[n];
                let tc = t.clamp(*lo, *hi);
                let mut p = py.push(tc);
                p[n] = tc;
                (p, dy.max((t - tc).abs()))
            }
        }
    }

    pub fn distance(&self, x: &Vector) -> f64 {
        self.project(x).1
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.distance(x) <= tol
    }

    pub fn translate(&self, v: &Vector) -> ConvexBody {
        match self {
            ConvexBody::Polytope { vertices } => ConvexBody::Polytope {
                vertices: vertices.iter().map(|p| p + v).collect(),
            },
            ConvexBody::Ball { center, radius } => ConvexBody::Ball {
                center: center + v,
                radius: *radius,
            },
            ConvexBody::Enlargement { base, eps } => ConvexBody::Enlargement {
                base: Box::new(base.translate(v)),
                eps: *eps,
            },
            ConvexBody::Product { base, lo, hi } => {
                let n = base.dim();
                let s = v[n];
                ConvexBody::Product {
                    base: Box::new(base.translate(&v.rows(0, n).into_owned())),
                    lo: lo + s,
                    hi: hi + s,
                }
            }
        }
    }

    /// `t·B` for `t ≥ 0`.
    pub fn scale(&self, t: f64) -> ConvexBody {
        debug_assert!(t >= 0.0);
        match self {
            ConvexBody::Polytope { vertices } => ConvexBody::Polytope {
                vertices: vertices.iter().map(|p| p * t).collect(),
            },
            ConvexBody::Ball { center, radius } => ConvexBody::Ball {
                center: center * t,
                radius: radius * t,
            },
            ConvexBody::Enlargement { base, eps } => ConvexBody::Enlargement {
                base: Box::new(base.scale(t)),
                eps: eps * t,
            },
            ConvexBody::Product { base, lo, hi } => ConvexBody::Product {
                base: Box::new(base.scale(t)),
                lo: lo * t,
                hi: hi * t,
            },
        }
    }

    /// `inf_{y∈B} p·y`.
    pub fn inf_linear(&self, p: &Vector) -> f64 {
        debug_assert_eq!(p.len(), self.dim());
        match self {
            ConvexBody::Polytope { vertices } => vertices
                .iter()
                .map(|v| v.dot(p))
                .fold(f64::INFINITY, f64::min),
            ConvexBody::Ball { center, radius } => center.dot(p) - radius * p.norm(),
            ConvexBody::Enlargement { base, eps } => {
                base.inf_linear(p) - eps * base.space().dual_norm(p)
            }
            ConvexBody::Product { base, lo, hi } => {
                let n = base.dim();
                let s = p[n];
                base.inf_linear(&p.rows(0, n).into_owned()) + (s * lo).min(s * hi)
            }
        }
    }

    pub fn sup_linear(&self, p: &Vector) -> f64 {
        -self.inf_linear(&-p)
    }

    /// `inf_{y∈B} ‖y‖`.
    pub fn inf_norm(&self) -> f64 {
        match self {
            ConvexBody::Product { base, lo, hi } => {
                let t = if *lo <= 0.0 && *hi >= 0.0 {
                    0.0
                } else {
                    lo.abs().min(hi.abs())
                };
                base.inf_norm().max(t)
            }
            _ => self.distance(&Vector::zeros(self.dim())),
        }
    }

    /// `sup_{y∈B} ‖y‖`; attained at a vertex for polytopes.
    pub fn sup_norm(&self) -> f64 {
        match self {
            ConvexBody::Polytope { vertices } => {
                vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
            ConvexBody::Ball { center, radius } => center.norm() + radius,
            ConvexBody::Enlargement { base, eps } => base.sup_norm() + eps,
            ConvexBody::Product { base, lo, hi } => {
                base.sup_norm().max(lo.abs()).max(hi.abs())
            }
        }
    }

    /// Vertex list when the body is a polytope (possibly lifted), else `None`.
    pub fn polyhedral_vertices(&self) -> Option<Vec<Vector>> {
        match self {
            ConvexBody::Polytope { vertices } => Some(vertices.clone()),
            ConvexBody::Product { base, lo, hi } => {
                let base_v = base.polyhedral_vertices()?;
                let ends: &[f64] = if lo == hi { &[*lo][..] } else { &[*lo, *hi][..] };
                let mut out = Vec::with_capacity(base_v.len() * ends.len());
                for v in &base_v {
                    for t in ends {
                        out.push(v.clone().push(*t));
                    }
                }
                Some(out)
            }
            ConvexBody::Ball { radius, center } if *radius == 0.0 => Some(vec![center.clone()]),
            _ => None,
        }
    }

    /// A point of the body (a vertex, the center, ...).
    pub fn anchor(&self) -> Vector {
        match self {
            ConvexBody::Polytope { vertices } => vertices[0].clone(),
            ConvexBody::Ball { center, .. } => center.clone(),
            ConvexBody::Enlargement { base, .. } => base.anchor(),
            ConvexBody::Product { base, lo, .. } => base.anchor().push(*lo),
        }
    }
}

/// `dist(x, body) ≤ tol`.
pub fn body_membership(body: &ConvexBody, x: &Vector, tol: f64) -> bool {
    body.contains(x, tol)
}

/// Enlarges a body by `eps`.
pub fn enlarge(body: &ConvexBody, eps: f64) -> Result<ConvexBody> {
    body.enlarge(eps)
}

/// `inf p(A)`.
pub fn inf_linear(body: &ConvexBody, p: &Vector) -> f64 {
    body.inf_linear(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_row_slice(x)
    }

    #[test]
    fn ball_center_is_member() {
        let b = ConvexBody::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert!(body_membership(&b, &v(&[0.0, 0.0]), 0.0));
    }

    #[test]
    fn segment_membership() {
        let s = ConvexBody::polytope_from(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert!(body_membership(&s, &v(&[0.5, 0.5]), 1e-9));
        assert!(!body_membership(&s, &v(&[0.6, 0.6]), 1e-9));
    }

    #[test]
    fn segment_distance_matches_sweep() {
        let s = ConvexBody::polytope_from(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let x = v(&[0.6, 0.6]);
        let sweep = (0..=100_000)
            .map(|i| {
                let t = i as f64 / 100_000.0;
                (v(&[1.0 - t, t]) - &x).norm()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((s.distance(&x) - sweep).abs() < 1e-9);
        assert!((sweep - 0.1414213562).abs() < 1e-6);
    }

    #[test]
    fn enlarged_point_is_unit_ball() {
        let p = ConvexBody::polytope_from(&[&[0.0, 0.0]]).unwrap();
        let e = enlarge(&p, 1.0).unwrap();
        let ball = ConvexBody::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        for i in -15..=15 {
            for j in -15..=15 {
                let x = v(&[i as f64 / 10.0, j as f64 / 10.0]);
                assert_eq!(e.contains(&x, 1e-12), ball.contains(&x, 1e-12), "{x:?}");
            }
        }
    }

    #[test]
    fn enlarged_ball_is_bigger_ball() {
        let b = ConvexBody::ball(v(&[1.0, -1.0]), 0.5).unwrap();
        let e = enlarge(&b, 0.25).unwrap();
        let big = ConvexBody::ball(v(&[1.0, -1.0]), 0.75).unwrap();
        for i in -20..=20 {
            for j in -20..=20 {
                let x = v(&[1.0 + i as f64 / 20.0, -1.0 + j as f64 / 20.0]);
                assert_eq!(e.contains(&x, 1e-12), big.contains(&x, 1e-12));
            }
        }
    }

    #[test]
    fn inf_linear_examples() {
        let s = ConvexBody::polytope_from(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert_eq!(inf_linear(&s, &v(&[1.0, 2.0])), 1.0);
        let b = ConvexBody::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(inf_linear(&b, &v(&[3.0, 4.0])), -5.0);
        assert_eq!(inf_linear(&b, &v(&[0.0, 0.0])), 0.0);
        assert_eq!(inf_linear(&s, &v(&[0.0, 0.0])), 0.0);
    }

    #[test]
    fn inf_linear_of_enlargement_and_product() {
        let s = ConvexBody::polytope_from(&[&[2.0, 0.0]]).unwrap();
        let e = s.enlarge(0.5).unwrap();
        assert!((inf_linear(&e, &v(&[1.0, 0.0])) - 1.5).abs() < 1e-15);
        let lifted = ConvexBody::product(s, 1.0, 1.0).unwrap().enlarge(0.25).unwrap();
        // (A_δ) × [0.75, 1.25] with p = (1, 0, -2): 1.75 - 2.5
        assert!((lifted.inf_linear(&v(&[1.0, 0.0, -2.0])) - (1.75 - 2.5)).abs() < 1e-15);
    }

    #[test]
    fn product_uses_sup_norm() {
        let s = ConvexBody::polytope_from(&[&[1.0, 0.0]]).unwrap();
        let p = ConvexBody::product(s, 1.0, 1.0).unwrap();
        assert_eq!(p.distance(&v(&[1.0, 3.0, 1.0])), 3.0);
        assert_eq!(p.distance(&v(&[1.0, 3.0, -4.0])), 5.0);
        assert_eq!(p.space().norm_kind(), crate::NormKind::Sup);
        assert_eq!(p.inf_norm(), 1.0);
    }

    #[test]
    fn body_json_format() {
        let json = r#"{"kind":"enlargement","base":{"kind":"polytope","vertices":[[1,0],[0,1]]},"eps":0.5}"#;
        let b: ConvexBody = serde_json::from_str(json).unwrap();
        assert!(matches!(b, ConvexBody::Enlargement { eps, .. } if eps == 0.5));
        let ball: ConvexBody =
            serde_json::from_str(r#"{"kind":"ball","center":[3,0],"radius":1}"#).unwrap();
        assert_eq!(ball.sup_norm(), 4.0);
        assert!(serde_json::from_str::<ConvexBody>(r#"{"kind":"ball","center":[0],"radius":1,"x":2}"#).is_err());
    }

    #[test]
    fn validation_rejects_bad_bodies() {
        assert!(ConvexBody::polytope(vec![]).is_err());
        assert!(ConvexBody::ball(v(&[0.0]), -1.0).is_err());
        assert!(ConvexBody::polytope_from(&[&[0.0, 1.0], &[1.0]]).is_err());
        assert!(ConvexBody::ball(v(&[0.0]), 1.0).unwrap().enlarge(0.0).is_err());
    }
}
