use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Objective, OracleKind, Subdifferential};
use crate::geometry::ConvexBody;
use crate::{serde_vector, Result, Vector};

/// Relative tolerance for a max-affine piece to count as active.
const ACTIVE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffinePiece {
    #[serde(with = "serde_vector")]
    pub p: Vector,
    #[serde(default)]
    pub c: f64,
}

/// A lower semicontinuous function `ℝⁿ → ℝ ∪ {+∞}` with its oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarFunction {
    Constant {
        value: f64,
    },
    /// `p·x + c`.
    Affine {
        #[serde(with = "serde_vector")]
        p: Vector,
        #[serde(default)]
        c: f64,
    },
    /// `xᵀQx + b·x + c`.
    Quadratic {
        #[serde(with = "serde_matrix")]
        q: DMatrix<f64>,
        #[serde(with = "serde_vector")]
        b: Vector,
        #[serde(default)]
        c: f64,
    },
    /// `−‖x − center‖`.
    NegNorm {
        #[serde(with = "serde_vector")]
        center: Vector,
    },
    /// `max_i (pᵢ·x + cᵢ)`.
    MaxAffine { pieces: Vec<AffinePiece> },
    Sum { terms: Vec<ScalarFunction> },
    /// `base` on the closed ball `B(center; radius)`, `+∞` outside.
    Restricted {
        base: Box<ScalarFunction>,
        #[serde(with = "serde_vector")]
        center: Vector,
        radius: f64,
    },
    /// `(x, t) ↦ base(x) − κ t` on `X × ℝ`.
    Lifted {
        base: Box<ScalarFunction>,
        kappa: f64,
    },
}

mod serde_matrix {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.row_iter().map(|r| r.iter().copied().collect::<Vec<f64>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("quadratic form must be square"));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }
}

impl ScalarFunction {
    pub fn constant(value: f64) -> Self {
        ScalarFunction::Constant { value }
    }

    pub fn linear(p: Vector) -> Self {
        ScalarFunction::Affine { p, c: 0.0 }
    }

    pub fn affine(p: Vector, c: f64) -> Self {
        ScalarFunction::Affine { p, c }
    }

    pub fn quadratic(q: DMatrix<f64>, b: Vector, c: f64) -> Self {
        ScalarFunction::Quadratic { q, b, c }
    }

    /// `‖x‖²`.
    pub fn bowl(dim: usize) -> Self {
        Self::quadratic(DMatrix::identity(dim, dim), Vector::zeros(dim), 0.0)
    }

    /// `‖x − center‖²`.
    pub fn shifted_bowl(center: &Vector) -> Self {
        let n = center.len();
        Self::quadratic(DMatrix::identity(n, n), center * -2.0, center.norm_squared())
    }

    pub fn neg_norm(center: Vector) -> Self {
        ScalarFunction::NegNorm { center }
    }

    pub fn max_affine(pieces: Vec<(Vector, f64)>) -> Self {
        ScalarFunction::MaxAffine {
            pieces: pieces.into_iter().map(|(p, c)| AffinePiece { p, c }).collect(),
        }
    }

    pub fn sum(terms: Vec<ScalarFunction>) -> Self {
        ScalarFunction::Sum { terms }
    }

    /// `f̂`: equal to `self` on `B(center; radius)` and `+∞` outside.
    pub fn restricted(self, center: Vector, radius: f64) -> Self {
        ScalarFunction::Restricted {
            base: Box::new(self),
            center,
            radius,
        }
    }

    /// `f̃(x, t) = f(x) − κ t`.
    pub fn lifted(self, kappa: f64) -> Self {
        ScalarFunction::Lifted {
            base: Box::new(self),
            kappa,
        }
    }

    /// Dimension of the domain, `None` for dimension-free constants.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ScalarFunction::Constant { .. } => None,
            ScalarFunction::Affine { p, .. } => Some(p.len()),
            ScalarFunction::Quadratic { b, .. } => Some(b.len()),
            ScalarFunction::NegNorm { center } => Some(center.len()),
            ScalarFunction::MaxAffine { pieces } => pieces.first().map(|p| p.p.len()),
            ScalarFunction::Sum { terms } => terms.iter().find_map(|t| t.dim()),
            ScalarFunction::Restricted { center, .. } => Some(center.len()),
            ScalarFunction::Lifted { base, .. } => base.dim().map(|d| d + 1),
        }
    }

    /// Structural validation: consistent dimensions, finite coefficients.
    pub fn validate(&self) -> Result<()> {
        use crate::Error;
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        match self {
            ScalarFunction::Constant { value } if !value.is_finite() => bad("non-finite constant"),
            ScalarFunction::Quadratic { q, b, .. } if q.nrows() != b.len() => {
                bad("quadratic form and linear term disagree in dimension")
            }
            ScalarFunction::MaxAffine { pieces } => {
                let first = match pieces.first() {
                    Some(p) => p.p.len(),
                    None => return bad("max-affine function without pieces"),
                };
                if pieces.iter().any(|p| p.p.len() != first) {
                    return bad("max-affine pieces disagree in dimension");
                }
                Ok(())
            }
            ScalarFunction::Sum { terms } => {
                if terms.is_empty() {
                    return bad("empty sum");
                }
                for t in terms {
                    t.validate()?;
                }
                let dims: Vec<usize> = terms.iter().filter_map(|t| t.dim()).collect();
                if dims.windows(2).any(|w| w[0] != w[1]) {
                    return bad("sum terms disagree in dimension");
                }
                Ok(())
            }
            ScalarFunction::Restricted { base, center, radius } => {
                if !(*radius > 0.0) {
                    return bad("restriction radius must be > 0");
                }
                if base.dim().is_some_and(|d| d != center.len()) {
                    return bad("restriction center has wrong dimension");
                }
                base.validate()
            }
            ScalarFunction::Lifted { base, kappa } => {
                if !kappa.is_finite() {
                    return bad("non-finite slope");
                }
                base.validate()
            }
            _ => Ok(()),
        }
    }

    pub fn oracle_kind(&self) -> OracleKind {
        match self {
            ScalarFunction::MaxAffine { .. } => OracleKind::ConvexMaxAffine,
            ScalarFunction::Sum { terms } => {
                let kinds: Vec<OracleKind> = terms.iter().map(|t| t.oracle_kind()).collect();
                if kinds.contains(&OracleKind::None) {
                    OracleKind::None
                } else if kinds.contains(&OracleKind::ConvexMaxAffine) {
                    OracleKind::ConvexMaxAffine
                } else {
                    OracleKind::Gradient
                }
            }
            ScalarFunction::Restricted { base, .. } | ScalarFunction::Lifted { base, .. } => {
                base.oracle_kind()
            }
            _ => OracleKind::Gradient,
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            ScalarFunction::Constant { .. }
            | ScalarFunction::Affine { .. }
            | ScalarFunction::MaxAffine { .. } => true,
            ScalarFunction::Quadratic { q, .. } => {
                let sym = (q + q.transpose()) * 0.5;
                sym.symmetric_eigenvalues().iter().all(|&e| e >= -1e-12)
            }
            ScalarFunction::NegNorm { .. } => false,
            ScalarFunction::Sum { terms } => terms.iter().all(|t| t.is_convex()),
            ScalarFunction::Restricted { base, .. } | ScalarFunction::Lifted { base, .. } => {
                base.is_convex()
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            ScalarFunction::Constant { value } => format!("const({value})"),
            ScalarFunction::Affine { .. } => "affine".into(),
            ScalarFunction::Quadratic { .. } => "quadratic".into(),
            ScalarFunction::NegNorm { .. } => "neg-norm".into(),
            ScalarFunction::MaxAffine { pieces } => format!("max-affine({})", pieces.len()),
            ScalarFunction::Sum { terms } => terms
                .iter()
                .map(|t| t.label())
                .collect::<Vec<_>>()
                .join("+"),
            ScalarFunction::Restricted { base, radius, .. } => {
                format!("{}|ball({radius})", base.label())
            }
            ScalarFunction::Lifted { base, kappa } => format!("lift({}, {kappa})", base.label()),
        }
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        match self {
            ScalarFunction::Constant { value } => *value,
            ScalarFunction::Affine { p, c } => p.dot(x) + c,
            ScalarFunction::Quadratic { q, b, c } => x.dot(&(q * x)) + b.dot(x) + c,
            ScalarFunction::NegNorm { center } => -(x - center).norm(),
            ScalarFunction::MaxAffine { pieces } => pieces
                .iter()
                .map(|pc| pc.p.dot(x) + pc.c)
                .fold(f64::NEG_INFINITY, f64::max),
            ScalarFunction::Sum { terms } => terms.iter().map(|t| t.eval(x)).sum(),
            ScalarFunction::Restricted {
                base,
                center,
                radius,
            } => {
                if (x - center).norm() <= *radius {
                    base.eval(x)
                } else {
                    f64::INFINITY
                }
            }
            ScalarFunction::Lifted { base, kappa } => {
                let n = x.len() - 1;
                base.eval(&x.rows(0, n).into_owned()) - kappa * x[n]
            }
        }
    }

    pub fn subgradients(&self, x: &Vector) -> Subdifferential {
        match self {
            ScalarFunction::Constant { .. } => Subdifferential::singleton(Vector::zeros(x.len())),
            ScalarFunction::Affine { p, .. } => Subdifferential::singleton(p.clone()),
            ScalarFunction::Quadratic { q, b, .. } => {
                Subdifferential::singleton((q + q.transpose()) * x + b)
            }
            ScalarFunction::NegNorm { center } => {
                let d = x - center;
                let n = d.norm();
                if n == 0.0 {
                    Subdifferential::empty()
                } else {
                    Subdifferential::singleton(-d / n)
                }
            }
            ScalarFunction::MaxAffine { pieces } => {
                let vals: Vec<f64> = pieces.iter().map(|pc| pc.p.dot(x) + pc.c).collect();
                let top = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let slack = ACTIVE_TOL * (1.0 + top.abs());
                Subdifferential {
                    generators: pieces
                        .iter()
                        .zip(&vals)
                        .filter(|(_, v)| **v >= top - slack)
                        .map(|(pc, _)| pc.p.clone())
                        .collect(),
                }
            }
            ScalarFunction::Sum { terms } => {
                let mut acc = Subdifferential::singleton(Vector::zeros(x.len()));
                for t in terms {
                    acc = acc.minkowski_sum(&t.subgradients(x));
                }
                acc
            }
            ScalarFunction::Restricted {
                base,
                center,
                radius,
            } => {
                if (x - center).norm() <= *radius {
                    base.subgradients(x)
                } else {
                    Subdifferential::empty()
                }
            }
            ScalarFunction::Lifted { base, kappa } => {
                let n = x.len() - 1;
                let inner = base.subgradients(&x.rows(0, n).into_owned());
                Subdifferential {
                    generators: inner
                        .generators
                        .into_iter()
                        .map(|g| g.push(-kappa))
                        .collect(),
                }
            }
        }
    }
}

impl Objective for ScalarFunction {
    fn value(&self, x: &Vector) -> f64 {
        self.eval(x)
    }

    fn subdifferential(&self, x: &Vector) -> Subdifferential {
        if !self.eval(x).is_finite() {
            return Subdifferential::empty();
        }
        self.subgradients(x)
    }
}

/// `f̃(x,t) = f(x) − κt` together with the lifted bodies of the product space.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedProblem {
    pub base: ScalarFunction,
    pub kappa: f64,
    pub function: ScalarFunction,
}

impl LiftedProblem {
    pub fn value(&self, x: &Vector, t: f64) -> f64 {
        self.function.eval(&x.clone().push(t))
    }

    /// `ã = (a, 0)`.
    pub fn lift_point(&self, a: &Vector) -> Vector {
        a.clone().push(0.0)
    }

    /// `Ã = A × {1}`.
    pub fn lift_body(&self, body: &ConvexBody) -> Result<ConvexBody> {
        ConvexBody::product(body.clone(), 1.0, 1.0)
    }

    /// `Ã_δ = A_δ × [1 − δ, 1 + δ]` under the max product norm.
    pub fn lift_body_enlarged(&self, body: &ConvexBody, delta: f64) -> Result<ConvexBody> {
        self.lift_body(body)?.enlarge(delta)
    }
}

pub fn lift(f: &ScalarFunction, kappa: f64) -> LiftedProblem {
    LiftedProblem {
        base: f.clone(),
        kappa,
        function: f.clone().lifted(kappa),
    }
}
