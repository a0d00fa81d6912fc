//! Deterministic samplers for convex bodies.
//!
//! The same sampler backs `inf f(A)`, the inner infima of the derivative
//! estimator and the witness grids, so every result is reproducible
//! bit-for-bit at a fixed refinement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ConvexBody;
use crate::Vector;

/// Cap on barycentric grid size for one polytope.
const MAX_POLYTOPE_SAMPLES: usize = 20_000;

/// Deterministic finite sample of `body`; always contains every vertex of a
/// polytope and the extreme points `center ± r eᵢ` of a ball.
pub fn sample_body(body: &ConvexBody, refinement: usize) -> Vec<Vector> {
    let r = refinement.max(1);
    match body {
        ConvexBody::Polytope { vertices } => barycentric_grid(vertices, r),
        ConvexBody::Ball { center, radius } => {
            let mut out = vec![center.clone()];
            if *radius == 0.0 {
                return out;
            }
            let shells = r.div_ceil(4).max(1);
            let dirs = unit_directions(center.len(), r);
            for s in 1..=shells {
                let rho = radius * s as f64 / shells as f64;
                out.extend(dirs.iter().map(|u| center + u * rho));
            }
            out
        }
        ConvexBody::Enlargement { base, eps } => {
            let mut out = sample_body(base, r);
            if *eps == 0.0 {
                return out;
            }
            let coarse = sample_body(base, (r / 4).max(1));
            let dirs = unit_directions(base.dim(), (r / 2).max(2));
            for b in &coarse {
                out.extend(dirs.iter().map(|u| b + u * *eps));
            }
            out
        }
        ConvexBody::Product { base, lo, hi } => {
            let base_pts = sample_body(base, r);
            let ts: Vec<f64> = if lo == hi {
                vec![*lo]
            } else {
                // lifted factors are thin; ends and midpoint suffice
                vec![*lo, 0.5 * (lo + hi), *hi]
            };
            let mut out = Vec::with_capacity(base_pts.len() * ts.len());
            for b in &base_pts {
                for t in &ts {
                    out.push(b.clone().push(*t));
                }
            }
            out
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

fn barycentric_grid(vertices: &[Vector], refinement: usize) -> Vec<Vector> {
    let m = vertices.len();
    if m == 1 {
        return vec![vertices[0].clone()];
    }
    let mut r = refinement;
    while r > 1 && binomial(r + m - 1, m - 1) > MAX_POLYTOPE_SAMPLES {
        r -= 1;
    }
    let mut out = Vec::new();
    let mut parts = vec![0usize; m];
    compositions(r, 0, &mut parts, &mut |w| {
        let mut p = Vector::zeros(vertices[0].len());
        for (k, c) in w.iter().enumerate() {
            if *c > 0 {
                p.axpy(*c as f64 / r as f64, &vertices[k], 1.0);
            }
        }
        out.push(p);
    });
    out
}

fn compositions(rest: usize, k: usize, parts: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    let m = parts.len();
    if k == m - 1 {
        parts[k] = rest;
        emit(parts);
        return;
    }
    for c in (0..=rest).rev() {
        parts[k] = c;
        compositions(rest - c, k + 1, parts, emit);
    }
}

/// Deterministic unit directions in ℝⁿ; always includes `±eᵢ`.
pub fn unit_directions(dim: usize, refinement: usize) -> Vec<Vector> {
    let r = refinement.max(1);
    match dim {
        0 => vec![],
        1 => vec![Vector::from_element(1, 1.0), Vector::from_element(1, -1.0)],
        2 => {
            let n = (4 * r).max(8);
            (0..n)
                .map(|k| {
                    let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    Vector::from_row_slice(&[a.cos(), a.sin()])
                })
                .collect()
        }
        _ => {
            let mut out = Vec::new();
            for i in 0..dim {
                for s in [1.0, -1.0] {
                    let mut e = Vector::zeros(dim);
                    e[i] = s;
                    out.push(e);
                }
            }
            let n = (2 * r * r).max(4 * dim);
            if dim == 3 {
                // Fibonacci lattice
                let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
                for k in 0..n {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let th = golden * k as f64;
                    out.push(Vector::from_row_slice(&[rho * th.cos(), rho * th.sin(), z]));
                }
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d1f5);
                for _ in 0..n {
                    let g = Vector::from_fn(dim, |_, _| standard_normal(&mut rng));
                    let norm = g.norm();
                    if norm > 1e-12 {
                        out.push(g / norm);
                    }
                }
            }
            out
        }
    }
}

/// Box–Muller draw.
fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}
