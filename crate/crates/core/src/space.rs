use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// Points and covectors of ℝⁿ.
pub type Vector = DVector<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Euclidean,
    /// `‖(x, t)‖ = max{‖x‖, |t|}` on a lifted product space.
    Sup,
}

/// The ambient space of a computation: a Euclidean base `ℝᵏ` lifted `lifts`
/// times by `× ℝ` under the max product norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Space {
    pub base_dim: usize,
    pub lifts: usize,
}

impl Space {
    pub fn euclidean(dim: usize) -> Self {
        Space {
            base_dim: dim,
            lifts: 0,
        }
    }

    pub fn lifted(self) -> Self {
        Space {
            lifts: self.lifts + 1,
            ..self
        }
    }

    pub fn dimension(&self) -> usize {
        self.base_dim + self.lifts
    }

    pub fn norm_kind(&self) -> NormKind {
        if self.lifts == 0 {
            NormKind::Euclidean
        } else {
            NormKind::Sup
        }
    }

    pub fn norm(&self, x: &Vector) -> f64 {
        debug_assert_eq!(x.len(), self.dimension());
        let base = x.rows(0, self.base_dim).norm();
        x.iter()
            .skip(self.base_dim)
            .fold(base, |m, v| m.max(v.abs()))
    }

    /// Dual norm of a covector: `‖p‖₂ + Σ|σᵢ|` for the lifted coordinates.
    pub fn dual_norm(&self, p: &Vector) -> f64 {
        debug_assert_eq!(p.len(), self.dimension());
        let base = p.rows(0, self.base_dim).norm();
        base + p.iter().skip(self.base_dim).map(|v| v.abs()).sum::<f64>()
    }

    pub fn dist(&self, x: &Vector, y: &Vector) -> f64 {
        self.norm(&(x - y))
    }
}

/// Serde adapter storing a [`Vector`] as a plain JSON array.
pub mod serde_vector {
    use super::Vector;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Vector, s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
        let raw = Vec::<f64>::deserialize(d)?;
        Ok(Vector::from_vec(raw))
    }
}

/// Serde adapter storing a list of [`Vector`]s as nested JSON arrays.
pub mod serde_vectors {
    use super::Vector;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vector], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|p| p.as_slice()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vector>, D::Error> {
        let raw = Vec::<Vec<f64>>::deserialize(d)?;
        Ok(raw.into_iter().map(Vector::from_vec).collect())
    }
}

/// Lexicographic order on coordinates, used for deterministic tie-breaks.
pub(crate) fn lex_cmp(a: &Vector, b: &Vector) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}
