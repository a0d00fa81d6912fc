//! Finite-dimensional toolkit for multidirectional nonsmooth analysis.
//!
//! The crate works with nonempty closed bounded convex sets `A ⊂ ℝⁿ`
//! ([`ConvexBody`]), extended-real functions with subgradient oracles
//! ([`ScalarFunction`]) and finite point clouds. On top of that it provides:
//!
//! - estimation of the multidirectional lower derivative
//!   `f⁻(x;A) = liminf_{t↓0} (inf f(x+tA) − f(x))/t` ([`derivative`]);
//! - the cone-order orbit search for Bishop–Phelps extremal points
//!   ([`bishop_phelps`]);
//! - constructive Rolle / Lagrange witnesses for the primal mean value
//!   inequality ([`witness`]);
//! - the penalized-minimization bridge from the derivative to subgradients and
//!   the dual Clarke–Ledyaev witness ([`bridge`]).
//!
//! Everything is pure and deterministic. Inner loops run on rayon when the
//! `parallel` feature is enabled (the default) and sequentially otherwise.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bishop_phelps;
pub mod bridge;
pub mod derivative;
mod error;
pub mod exec;
pub mod geometry;
pub mod oracles;
mod space;
pub mod witness;

pub use error::{Error, Result};
pub use geometry::{ConvexBody, Cone, ConeGeometryStats, MultiInterval};
pub use oracles::{Objective, OracleKind, ScalarFunction, Subdifferential};
pub use space::{serde_vector, serde_vectors, NormKind, Space, Vector};

/// Default tolerance for geometric predicates.
pub const DEFAULT_TOL: f64 = 1e-9;
