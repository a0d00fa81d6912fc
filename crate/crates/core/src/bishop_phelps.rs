//! Extremal points of finite clouds for the order induced by a cone
//! `C(0;B)`: the greedy orbit iteration and the translate-and-scale wrapper
//! that produces `x̄` with `M ∩ (x̄ + C(0;A − a)) = {x̄}`.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::exec::{self, Backend};
use crate::geometry::{cone_stats, Cone, ConvexBody};
use crate::space::lex_cmp;
use crate::{Error, Result, Space, Vector};

/// A finite set of distinct points.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    points: Vec<Vector>,
}

impl PointCloud {
    /// Keeps the first of any group of points closer than `tol`
    /// (Euclidean); exact duplicates when `tol == 0`.
    pub fn new(points: Vec<Vector>, tol: f64) -> Result<Self> {
        if let Some(first) = points.first() {
            let d = first.len();
            for p in &points {
                Error::check_dim(d, p)?;
            }
        }
        if points.iter().any(|p| p.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidInput("cloud point with non-finite coordinate".into()));
        }
        if tol <= 0.0 {
            let mut seen = HashSet::new();
            let kept = points
                .into_iter()
                .filter(|p| seen.insert(p.iter().map(|x| (x + 0.0).to_bits()).collect::<Vec<u64>>()))
                .collect();
            return Ok(PointCloud { points: kept });
        }
        let key = |p: &Vector| -> Vec<i64> { p.iter().map(|x| (x / tol).floor() as i64).collect() };
        let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        let mut kept: Vec<Vector> = Vec::with_capacity(points.len());
        for p in points {
            let k = key(&p);
            let duplicate = neighbours(&k).any(|n| {
                grid.get(&n)
                    .is_some_and(|ids| ids.iter().any(|&i| (&kept[i] - &p).norm() <= tol))
            });
            if !duplicate {
                grid.entry(k).or_default().push(kept.len());
                kept.push(p);
            }
        }
        Ok(PointCloud { points: kept })
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(|p| p.len())
    }

    pub fn position(&self, x: &Vector, tol: f64) -> Option<usize> {
        self.points.iter().position(|p| (p - x).norm() <= tol)
    }
}

/// All cells adjacent to `k` (including `k`).
fn neighbours(k: &[i64]) -> impl Iterator<Item = Vec<i64>> + '_ {
    let n = 3usize.pow(k.len() as u32);
    (0..n).map(move |mut code| {
        k.iter()
            .map(|&c| {
                let off = (code % 3) as i64 - 1;
                code /= 3;
                c.saturating_add(off)
            })
            .collect()
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitTrace {
    #[serde(with = "crate::serde_vectors")]
    pub points: Vec<Vector>,
    /// `ν_n`: the largest step available from `x_n` (the step taken).
    pub nus: Vec<f64>,
    /// Size of the successor set of each visited point.
    pub candidate_counts: Vec<usize>,
    #[serde(with = "crate::serde_vector")]
    pub extremal: Vector,
}

impl OrbitTrace {
    pub fn path_length(&self, space: Space) -> f64 {
        self.points
            .windows(2)
            .map(|w| space.dist(&w[1], &w[0]))
            .sum()
    }
}

/// Points `y` of `candidates` other than `x` with `y − x ∈ C(0;B)`.
fn successors(
    backend: Backend,
    cloud: &[Vector],
    candidates: &[usize],
    x: &Vector,
    cone: &Cone,
    space: Space,
    tol: f64,
) -> Vec<usize> {
    let keep = exec::map(backend, candidates, |&i| {
        let d = &cloud[i] - x;
        space.norm(&d) > tol && cone.contains(&d, tol)
    });
    candidates
        .iter()
        .zip(keep)
        .filter_map(|(&i, k)| k.then_some(i))
        .collect()
}

pub fn extremal_point(
    cloud: &PointCloud,
    body: &ConvexBody,
    start: &Vector,
    tol: f64,
) -> Result<(Vector, OrbitTrace)> {
    extremal_point_with(Backend::default(), cloud, body, start, tol)
}

/// Greedy orbit: from `x_n` move to the farthest point of
/// `V ∩ (x_n + C(0;B))`, ties to the lexicographically smallest, until the
/// successor set is empty. Successor sets are nested, so each step scans only
/// the previous one; a final scan of the whole cloud confirms extremality and
/// resumes the orbit if tolerance effects left a successor behind.
pub fn extremal_point_with(
    backend: Backend,
    cloud: &PointCloud,
    body: &ConvexBody,
    start: &Vector,
    tol: f64,
) -> Result<(Vector, OrbitTrace)> {
    cone_stats(body, tol)?;
    let pts = cloud.points();
    let mut current = cloud.position(start, tol).ok_or(Error::StartNotInCloud)?;
    Error::check_dim(body.dim(), &pts[current])?;
    let cone = Cone::from_directions(Vector::zeros(body.dim()), body.clone());
    let space = body.space();
    let all: Vec<usize> = (0..pts.len()).collect();

    let mut trace = OrbitTrace {
        points: vec![pts[current].clone()],
        nus: Vec::new(),
        candidate_counts: Vec::new(),
        extremal: pts[current].clone(),
    };
    let mut visited = vec![false; pts.len()];
    visited[current] = true;
    let mut candidates = all.clone();
    loop {
        let mut succ = successors(backend, pts, &candidates, &pts[current], &cone, space, tol);
        succ.retain(|&i| !visited[i]);
        if succ.is_empty() {
            if candidates.len() == pts.len() {
                break;
            }
            candidates = all.clone();
            continue;
        }
        let x = &pts[current];
        let best = succ
            .iter()
            .copied()
            .max_by(|&i, &j| {
                space
                    .dist(&pts[i], x)
                    .total_cmp(&space.dist(&pts[j], x))
                    .then_with(|| lex_cmp(&pts[j], &pts[i]))
            })
            .expect("nonempty successor set");
        trace.nus.push(space.dist(&pts[best], x));
        trace.candidate_counts.push(succ.len());
        trace.points.push(pts[best].clone());
        visited[best] = true;
        current = best;
        candidates = succ;
    }
    trace.candidate_counts.push(0);
    trace.extremal = pts[current].clone();
    Ok((pts[current].clone(), trace))
}

/// Exhaustive check that no other cloud point lies in `x + C(0;B)`.
/// Returns the first offending point, if any.
pub fn verify_extremal(
    cloud: &PointCloud,
    body: &ConvexBody,
    x: &Vector,
    tol: f64,
) -> Option<Vector> {
    let cone = Cone::from_directions(Vector::zeros(body.dim()), body.clone());
    let space = body.space();
    exec::position(Backend::default(), cloud.points(), |y| {
        let d = y - x;
        space.norm(&d) > tol && cone.contains(&d, tol)
    })
    .map(|i| cloud.points()[i].clone())
}

/// `Σ ‖x_{k+1} − x_k‖ ≤ ‖x_N − x_0‖ / c + N·tol` with `c = inf‖B‖ / sup‖B‖`.
pub fn orbit_bound_holds(trace: &OrbitTrace, body: &ConvexBody, tol: f64) -> Result<bool> {
    let stats = cone_stats(body, tol)?;
    let space = body.space();
    let first = &trace.points[0];
    let last = trace.points.last().unwrap_or(first);
    let steps = trace.points.len().saturating_sub(1) as f64;
    Ok(trace.path_length(space) <= space.dist(last, first) / stats.c + steps * tol + 1e-12)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BpOutcome {
    #[serde(with = "crate::serde_vector")]
    pub extremal: Vector,
    /// Power of two `t` with `inf‖tB′‖ > max‖V‖`.
    pub scale: f64,
    /// `|V|` where `V = (M − a) ∩ C(0;A − a)`.
    pub filtered: usize,
    /// Orbit in translated coordinates (starting at 0).
    pub trace: OrbitTrace,
}

pub fn bp_lemma(cloud: &PointCloud, apex: &Vector, body: &ConvexBody, tol: f64) -> Result<Vector> {
    bp_lemma_traced(cloud, apex, body, tol).map(|o| o.extremal)
}

/// Translate by `−a`, keep the cloud points inside `C(0;A − a)`, scale the
/// generator so that it clears the kept points, and run the orbit from 0.
pub fn bp_lemma_traced(
    cloud: &PointCloud,
    apex: &Vector,
    body: &ConvexBody,
    tol: f64,
) -> Result<BpOutcome> {
    Error::check_dim(body.dim(), apex)?;
    if body.contains(apex, tol) {
        return Err(Error::ApexInBody);
    }
    if cloud.position(apex, tol).is_none() {
        return Err(Error::ApexNotInCloud);
    }
    let shifted = body.translate(&-apex);
    let cone = Cone::from_directions(Vector::zeros(apex.len()), shifted.clone());
    let space = shifted.space();
    let translated: Vec<Vector> = cloud.points().iter().map(|m| m - apex).collect();
    let keep = exec::map(Backend::default(), &translated, |y| {
        space.norm(y) <= tol || cone.contains(y, tol)
    });
    let v: Vec<Vector> = translated
        .into_iter()
        .zip(keep)
        .filter_map(|(y, k)| k.then_some(y))
        .collect();
    let v = PointCloud::new(v, 0.0)?;

    let delta = shifted.inf_norm();
    let reach = v.points().iter().map(|y| space.norm(y)).fold(0.0, f64::max);
    let mut scale = 1.0f64;
    if reach > 0.0 {
        scale = 2f64.powi((reach / delta).log2().ceil() as i32);
        while scale * delta <= reach {
            scale *= 2.0;
        }
        while scale / 2.0 * delta > reach {
            scale /= 2.0;
        }
    }
    let (x0, trace) = extremal_point(&v, &shifted.scale(scale), &Vector::zeros(apex.len()), tol)?;
    Ok(BpOutcome {
        extremal: x0 + apex,
        scale,
        filtered: v.len(),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_row_slice(x)
    }

    fn grid(n: usize) -> Vec<Vector> {
        let mut out = Vec::new();
        for i in 0..=n {
            for j in 0..=n {
                out.push(v(&[i as f64 / n as f64, j as f64 / n as f64]));
            }
        }
        out
    }

    #[test]
    fn dedup_within_tolerance() {
        let c = PointCloud::new(vec![v(&[0.0, 0.0]), v(&[1e-10, 0.0]), v(&[1.0, 0.0])], 1e-9).unwrap();
        assert_eq!(c.len(), 2);
        let exact = PointCloud::new(vec![v(&[0.0, 0.0]), v(&[1e-10, 0.0])], 0.0).unwrap();
        assert_eq!(exact.len(), 2);
    }

    #[test]
    fn two_point_cloud() {
        let c = PointCloud::new(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0])], 1e-9).unwrap();
        let b = ConvexBody::polytope_from(&[&[1.0, 0.0]]).unwrap();
        let (x, t) = extremal_point(&c, &b, &v(&[0.0, 0.0]), 1e-9).unwrap();
        assert_eq!(x, v(&[1.0, 0.0]));
        assert_eq!(t.points.len(), 2);
        assert!(verify_extremal(&c, &b, &x, 1e-9).is_none());
        assert!(verify_extremal(&c, &b, &v(&[0.0, 0.0]), 1e-9).is_some());
    }

    #[test]
    fn singleton_cloud() {
        let c = PointCloud::new(vec![v(&[0.0, 0.0])], 1e-9).unwrap();
        let b = ConvexBody::ball(v(&[2.0, 1.0]), 0.5).unwrap();
        let (x, t) = extremal_point(&c, &b, &v(&[0.0, 0.0]), 1e-9).unwrap();
        assert_eq!(x, v(&[0.0, 0.0]));
        assert!(t.nus.is_empty());
    }

    #[test]
    fn quadrant_grid_reaches_the_corner() {
        let pts = grid(10);
        let c = PointCloud::new(pts.clone(), 1e-9).unwrap();
        let b = ConvexBody::polytope_from(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap().scale(0.1);
        let (x, t) = extremal_point(&c, &b, &v(&[0.0, 0.0]), 1e-9).unwrap();
        assert!((&x - v(&[1.0, 1.0])).norm() < 1e-12);
        // brute force: (1,1) is the only point with no other point
        // weakly north-east of it
        let maximal: Vec<&Vector> = pts
            .iter()
            .filter(|p| {
                !pts.iter()
                    .any(|q| q != *p && q[0] >= p[0] - 1e-12 && q[1] >= p[1] - 1e-12)
            })
            .collect();
        assert_eq!(maximal, vec![&v(&[1.0, 1.0])]);
        assert!(orbit_bound_holds(&t, &b, 1e-9).unwrap());
    }

    #[test]
    fn start_and_body_errors() {
        let c = PointCloud::new(vec![v(&[0.0, 0.0])], 1e-9).unwrap();
        let b = ConvexBody::polytope_from(&[&[1.0, 0.0]]).unwrap();
        assert!(matches!(
            extremal_point(&c, &b, &v(&[1.0, 0.0]), 1e-9),
            Err(Error::StartNotInCloud)
        ));
        let bad = ConvexBody::polytope_from(&[&[1.0, 0.0], &[-1.0, 0.0]]).unwrap();
        assert!(matches!(
            extremal_point(&c, &bad, &v(&[0.0, 0.0]), 1e-9),
            Err(Error::ZeroInBody { .. })
        ));
    }

    #[test]
    fn lemma_on_collinear_cloud() {
        let m = PointCloud::new(vec![v(&[0.0, 0.0]), v(&[0.5, 0.0]), v(&[1.0, 0.0])], 1e-9).unwrap();
        let a = ConvexBody::polytope_from(&[&[2.0, -1.0], &[2.0, 1.0]]).unwrap();
        let out = bp_lemma_traced(&m, &v(&[0.0, 0.0]), &a, 1e-9).unwrap();
        assert_eq!(out.extremal, v(&[1.0, 0.0]));
        assert_eq!(out.filtered, 3);
        // inf‖A‖ = 2 > 1 = max‖V‖ already at t = 1, and t = 1/2 does not clear it
        assert_eq!(out.scale, 1.0);
        let single = PointCloud::new(vec![v(&[0.3, 0.3])], 1e-9).unwrap();
        assert_eq!(bp_lemma(&single, &v(&[0.3, 0.3]), &a, 1e-9).unwrap(), v(&[0.3, 0.3]));
    }

    #[test]
    fn lemma_errors() {
        let m = PointCloud::new(vec![v(&[0.0, 0.0])], 1e-9).unwrap();
        let a = ConvexBody::polytope_from(&[&[2.0, -1.0], &[2.0, 1.0]]).unwrap();
        assert!(matches!(
            bp_lemma(&m, &v(&[2.0, 0.0]), &a, 1e-9),
            Err(Error::ApexInBody)
        ));
        assert!(matches!(
            bp_lemma(&m, &v(&[1.0, 0.0]), &a, 1e-9),
            Err(Error::ApexNotInCloud)
        ));
    }

    #[test]
    fn lemma_result_is_extremal_on_the_translated_cloud() {
        let pts: Vec<Vector> = grid(12).into_iter().map(|p| p * 3.0 - v(&[1.0, 1.5])).collect();
        let m = PointCloud::new(pts, 1e-9).unwrap();
        let a_pt = m.points()[40].clone();
        let a = ConvexBody::ball(&a_pt + v(&[1.0, 0.5]), 0.4).unwrap();
        let x = bp_lemma(&m, &a_pt, &a, 1e-9).unwrap();
        let cone = Cone::new(x.clone(), &a.translate(&(&x - &a_pt))).unwrap();
        for y in m.points() {
            if (y - &x).norm() > 1e-9 {
                assert!(!cone.contains(y, 1e-9), "{y:?} beats {x:?}");
            }
        }
        assert!(Cone::new(a_pt.clone(), &a).unwrap().contains(&x, 1e-9));
    }

    #[test]
    fn orbits_are_deterministic_across_backends() {
        let pts: Vec<Vector> = grid(20).into_iter().map(|p| v(&[p[0], p[1] * p[0]])).collect();
        let c = PointCloud::new(pts, 1e-9).unwrap();
        let b = ConvexBody::polytope_from(&[&[1.0, 0.2], &[1.0, 0.8]]).unwrap();
        let s = extremal_point_with(Backend::Sequential, &c, &b, &v(&[0.0, 0.0]), 1e-9).unwrap();
        let p = extremal_point_with(Backend::Parallel, &c, &b, &v(&[0.0, 0.0]), 1e-9).unwrap();
        assert_eq!(s, p);
    }
}
