use super::Objective;
use crate::exec::{self, Backend};
use crate::geometry::{sample::sample_body, ConvexBody};
use crate::{Error, Result, Vector};

/// `inf f(A)` over the deterministic sample of `A` at the given refinement.
pub fn inf_over_body<F: Objective + ?Sized>(f: &F, body: &ConvexBody, refinement: usize) -> Result<f64> {
    inf_over_body_with(Backend::default(), f, body, refinement)
}

pub fn inf_over_body_with<F: Objective + ?Sized>(
    backend: Backend,
    f: &F,
    body: &ConvexBody,
    refinement: usize,
) -> Result<f64> {
    let samples = sample_body(body, refinement);
    argmin_over_points(backend, f, &samples).map(|(_, v)| v)
}

/// Sample point attaining the sampled infimum (first index on ties).
pub fn argmin_over_body<F: Objective + ?Sized>(
    f: &F,
    body: &ConvexBody,
    refinement: usize,
) -> Result<(Vector, f64)> {
    let samples = sample_body(body, refinement);
    let (x, v) = argmin_over_points(Backend::default(), f, &samples)?;
    Ok((samples[x].clone(), v))
}

pub fn argmin_over_points<F: Objective + ?Sized>(
    backend: Backend,
    f: &F,
    points: &[Vector],
) -> Result<(usize, f64)> {
    match exec::argmin(backend, points, |x| f.value(x)) {
        Some((i, v)) if v.is_finite() => Ok((i, v)),
        _ => Err(Error::AllInfinite { level: None }),
    }
}
