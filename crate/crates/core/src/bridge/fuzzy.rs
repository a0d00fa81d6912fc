use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exec::{self, Backend};
use crate::geometry::{hull::min_norm_point, sample::sample_body};
use crate::oracles::Objective;
use crate::{ConvexBody, Error, Result, Vector};

/// Random starts added to the deterministic ones.
const RANDOM_STARTS: usize = 8;
/// Starts refined by compass search.
const REFINED_STARTS: usize = 3;
const MIN_STEP: f64 = 1e-13;
const MAX_EVALS: usize = 4_000;

/// `x = y` minimizing `f + g` on the ball and `p ∈ ∂f(x)`, `q ∈ ∂g(x)` with
/// `‖p + q‖` small.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzyPair {
    #[serde(with = "crate::serde_vector")]
    pub x: Vector,
    #[serde(with = "crate::serde_vector")]
    pub p: Vector,
    #[serde(with = "crate::serde_vector")]
    pub y: Vector,
    #[serde(with = "crate::serde_vector")]
    pub q: Vector,
    pub f_value: f64,
    pub g_value: f64,
    /// `‖p + q‖` (Euclidean).
    pub pair_norm: f64,
    /// Smallest value of `f + g` over the start set.
    pub start_min: f64,
}

/// Compass search with step halving; stays where it is on ties.
fn compass<H: Fn(&Vector) -> f64>(h: &H, x0: Vector, v0: f64, step0: f64) -> (Vector, f64) {
    let (mut x, mut v) = (x0, v0);
    let mut step = step0;
    let mut evals = 0;
    let dim = x.len();
    while step > MIN_STEP * (1.0 + x.amax()) && evals < MAX_EVALS {
        let mut moved = false;
        for i in 0..dim {
            for sgn in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] += sgn * step;
                let w = h(&y);
                evals += 1;
                if w < v {
                    x = y;
                    v = w;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    (x, v)
}

fn random_in_ball(rng: &mut ChaCha8Rng, center: &Vector, radius: f64) -> Vector {
    let n = center.len();
    loop {
        let u = Vector::from_fn(n, |_, _| rng.gen_range(-1.0..=1.0));
        if u.norm() <= 1.0 {
            return center + u * radius;
        }
    }
}

/// Minimize `f + g` over the closed Euclidean ball by multi-start compass
/// search, then select `p ∈ ∂f(x)`, `q ∈ ∂g(x)` minimizing `‖p + q‖`.
///
/// The selection first takes the least-norm point of `{g_i + h_j}` over the
/// generator pairs. If that misses `eps`, `q = −p` is tried for the
/// candidates `p` in the hull of `∂f(x)` (generators, least-norm point,
/// centroid, pairwise midpoints), checked with `g`'s membership oracle.
pub fn fuzzy_min_pair<F: Objective + ?Sized, G: Objective + ?Sized>(
    f: &F,
    g: &G,
    eps: f64,
    center: &Vector,
    radius: f64,
    seed: u64,
) -> Result<FuzzyPair> {
    if !(eps > 0.0) || !(radius > 0.0) {
        return Err(Error::InvalidInput("eps and radius must be > 0".into()));
    }
    let h = |x: &Vector| {
        if (x - center).norm() > radius {
            f64::INFINITY
        } else {
            f.value(x) + g.value(x)
        }
    };
    let mut starts = vec![center.clone()];
    let ball = ConvexBody::ball(center.clone(), radius)?;
    starts.extend(sample_body(&ball, 4).into_iter().skip(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_STARTS {
        starts.push(random_in_ball(&mut rng, center, radius));
    }
    let values = exec::map(Backend::default(), &starts, |x| h(x));
    let mut order: Vec<usize> = (0..starts.len()).filter(|&i| values[i].is_finite()).collect();
    if order.is_empty() {
        return Err(Error::AllInfinite { level: None });
    }
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let start_min = values[order[0]];
    order.truncate(REFINED_STARTS);
    let refined = exec::map_range(Backend::default(), order.len(), |k| {
        let i = order[k];
        compass(&h, starts[i].clone(), values[i], radius / 4.0)
    });
    let (x, _) = refined
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.1.total_cmp(&b.1).then(i.cmp(j)))
        .map(|(_, r)| r)
        .expect("at least one start");

    let sf = f.subdifferential(&x);
    let sg = g.subdifferential(&x);
    let mut best: Option<(Vector, Vector, f64)> = None;
    if !sf.is_empty() && !sg.is_empty() {
        let mut pairs = Vec::new();
        let mut sums = Vec::new();
        for a in &sf.generators {
            for b in &sg.generators {
                pairs.push((a, b));
                sums.push(a + b);
            }
        }
        let hp = min_norm_point(&sums);
        let mut p = Vector::zeros(x.len());
        let mut q = Vector::zeros(x.len());
        for (w, (a, b)) in hp.weights.iter().zip(&pairs) {
            p += *a * *w;
            q += *b * *w;
        }
        let norm = (&p + &q).norm();
        best = Some((p, q, norm));
    }
    if best.as_ref().is_none_or(|b| b.2 > eps) && !sf.is_empty() {
        let gens = &sf.generators;
        let mut cands: Vec<Vector> = gens.clone();
        if gens.len() > 1 {
            cands.push(min_norm_point(gens).point);
            cands.push(gens.iter().sum::<Vector>() / gens.len() as f64);
            for i in 0..gens.len() {
                for j in i + 1..gens.len() {
                    cands.push((&gens[i] + &gens[j]) / 2.0);
                }
            }
        }
        if let Some(p) = cands
            .into_iter()
            .find(|p| g.contains_subgradient(&x, &-p, eps.min(1e-9)))
        {
            let q = -&p;
            best = Some((p, q, 0.0));
        }
    }
    let (p, q, pair_norm) = match best {
        Some(b) if b.2 <= eps => b,
        Some(b) => {
            return Err(Error::ToleranceNotMet {
                eps,
                achieved: b.2,
            })
        }
        None => {
            return Err(Error::ToleranceNotMet {
                eps,
                achieved: f64::INFINITY,
            })
        }
    };
    Ok(FuzzyPair {
        f_value: f.value(&x),
        g_value: g.value(&x),
        y: x.clone(),
        x,
        p,
        q,
        pair_norm,
        start_min,
    })
}
