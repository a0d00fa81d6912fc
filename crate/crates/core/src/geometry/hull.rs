//! Nearest-point routines on finitely generated sets.
//!
//! [`min_norm_point`] is Wolfe's active-set method for the point of least
//! Euclidean norm in a convex hull; [`nnls`] is Lawson–Hanson for the
//! nearest point of a conic hull. Both terminate in finitely many steps in
//! exact arithmetic and are used at desk scale (tens of generators, n ≤ 10).

use nalgebra::{DMatrix, DVector};

use crate::Vector;

const MAX_MAJOR: usize = 500;
const MAX_MINOR: usize = 100;
const WEIGHT_EPS: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct HullPoint {
    pub point: Vector,
    /// Convex weights over the input points.
    pub weights: Vec<f64>,
}

/// Point of minimal Euclidean norm in `conv(points)`.
///
/// Panics on an empty slice.
pub fn min_norm_point(points: &[Vector]) -> HullPoint {
    assert!(!points.is_empty(), "min_norm_point of an empty set");
    let m = points.len();
    if m == 1 {
        return HullPoint {
            point: points[0].clone(),
            weights: vec![1.0],
        };
    }
    if m == 2 {
        return segment_min_norm(&points[0], &points[1]);
    }

    let scale = points
        .iter()
        .map(|p| p.norm_squared())
        .fold(f64::MIN_POSITIVE, f64::max);

    let first = points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm_squared().total_cmp(&b.1.norm_squared()))
        .map(|(i, _)| i)
        .unwrap();
    let mut corral = vec![first];
    let mut lambda = vec![1.0];
    let mut x = points[first].clone();

    for _ in 0..MAX_MAJOR {
        let (j, pj_x) = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.dot(&x)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if x.norm_squared() - pj_x <= 1e-15 * scale || corral.contains(&j) {
            break;
        }
        corral.push(j);
        lambda.push(0.0);

        for _ in 0..MAX_MINOR {
            let alpha = match affine_min(points, &corral) {
                Some(a) => a,
                None => break,
            };
            if alpha.iter().all(|&a| a > WEIGHT_EPS) {
                lambda = alpha;
                x = combine(points, &corral, &lambda);
                break;
            }
            let mut theta = 1.0f64;
            for (l, a) in lambda.iter().zip(&alpha) {
                if *a <= WEIGHT_EPS && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l += theta * (a - *l);
            }
            let mut k = 0;
            while k < corral.len() {
                if lambda[k] <= WEIGHT_EPS {
                    corral.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            if corral.is_empty() {
                corral.push(first);
                lambda.push(1.0);
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            x = combine(points, &corral, &lambda);
        }
    }

    let mut weights = vec![0.0; m];
    for (i, l) in corral.iter().zip(&lambda) {
        weights[*i] = *l;
    }
    HullPoint { point: x, weights }
}

fn segment_min_norm(p: &Vector, q: &Vector) -> HullPoint {
    let d = q - p;
    let dd = d.norm_squared();
    let s = if dd == 0.0 {
        0.0
    } else {
        (-p.dot(&d) / dd).clamp(0.0, 1.0)
    };
    HullPoint {
        point: p + &d * s,
        weights: vec![1.0 - s, s],
    }
}

fn combine(points: &[Vector], idx: &[usize], w: &[f64]) -> Vector {
    let mut out = Vector::zeros(points[0].len());
    for (i, l) in idx.iter().zip(w) {
        out.axpy(*l, &points[*i], 1.0);
    }
    out
}

/// Affine weights minimizing `‖Σ αᵢ pᵢ‖` over the corral, `Σ αᵢ = 1`.
fn affine_min(points: &[Vector], idx: &[usize]) -> Option<Vec<f64>> {
    let k = idx.len();
    let mut m = DMatrix::<f64>::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in a..k {
            let v = points[idx[a]].dot(&points[idx[b]]);
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
        m[(a, k)] = 1.0;
        m[(k, a)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = m
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .or_else(|| m.svd(true, true).solve(&rhs, 1e-13).ok())?;
    let alpha: Vec<f64> = sol.iter().take(k).copied().collect();
    let total: f64 = alpha.iter().sum();
    if !total.is_finite() || total.abs() < 1e-12 {
        return None;
    }
    Some(alpha.into_iter().map(|a| a / total).collect())
}

#[derive(Clone, Debug)]
pub struct ConicPoint {
    pub point: Vector,
    /// Nonnegative coefficients over the generators.
    pub coefficients: Vec<f64>,
}

/// Nearest point to `z` in the conic hull of `generators` (Euclidean).
pub fn nnls(generators: &[Vector], z: &Vector) -> ConicPoint {
    let m = generators.len();
    let n = z.len();
    if m == 0 {
        return ConicPoint {
            point: Vector::zeros(n),
            coefficients: vec![],
        };
    }
    if m == 1 {
        let g = &generators[0];
        let gg = g.norm_squared();
        let c = if gg > 0.0 { (g.dot(z) / gg).max(0.0) } else { 0.0 };
        return ConicPoint {
            point: g * c,
            coefficients: vec![c],
        };
    }

    let gmax = generators.iter().map(|g| g.norm()).fold(0.0, f64::max);
    let tol = 1e-13 * gmax.max(1e-300) * (z.norm() + 1.0);
    let mut lambda = vec![0.0; m];
    let mut passive = vec![false; m];

    let residual_grad = |lambda: &[f64]| -> Vec<f64> {
        let mut r = z.clone();
        for (g, l) in generators.iter().zip(lambda) {
            if *l != 0.0 {
                r.axpy(-*l, g, 1.0);
            }
        }
        generators.iter().map(|g| g.dot(&r)).collect()
    };

    for _ in 0..(3 * m + 10) {
        let w = residual_grad(&lambda);
        let next = (0..m)
            .filter(|&j| !passive[j])
            .max_by(|&a, &b| w[a].total_cmp(&w[b]));
        let j = match next {
            Some(j) if w[j] > tol => j,
            _ => break,
        };
        passive[j] = true;

        for _ in 0..(3 * m + 10) {
            let idx: Vec<usize> = (0..m).filter(|&i| passive[i]).collect();
            let s = match least_squares(generators, &idx, z) {
                Some(s) => s,
                None => {
                    passive[j] = false;
                    break;
                }
            };
            if s.iter().all(|&v| v > 0.0) {
                for (k, i) in idx.iter().enumerate() {
                    lambda[*i] = s[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, i) in idx.iter().enumerate() {
                if s[k] <= 0.0 {
                    let denom = lambda[*i] - s[k];
                    if denom > 0.0 {
                        alpha = alpha.min(lambda[*i] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, i) in idx.iter().enumerate() {
                lambda[*i] += alpha * (s[k] - lambda[*i]);
                if lambda[*i] <= 1e-15 * (1.0 + s[k].abs()) {
                    lambda[*i] = 0.0;
                    passive[*i] = false;
                }
            }
        }
    }

    let mut point = Vector::zeros(n);
    for (g, l) in generators.iter().zip(&lambda) {
        point.axpy(*l, g, 1.0);
    }
    ConicPoint {
        point,
        coefficients: lambda,
    }
}

fn least_squares(generators: &[Vector], idx: &[usize], z: &Vector) -> Option<Vec<f64>> {
    let n = z.len();
    let g = DMatrix::from_fn(n, idx.len(), |r, c| generators[idx[c]][r]);
    let sol = g.svd(true, true).solve(z, 1e-13).ok()?;
    if sol.iter().all(|v| v.is_finite()) {
        Some(sol.iter().copied().collect())
    } else {
        None
    }
}
