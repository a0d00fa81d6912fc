//! Execution backend for the data-parallel inner loops.
//!
//! With the `parallel` feature the default backend is rayon; without it every
//! call runs sequentially. Results never depend on the backend: maps preserve
//! order and reductions break ties by index.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Sequential,
    Parallel,
}

impl Default for Backend {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Backend::Parallel
        } else {
            Backend::Sequential
        }
    }
}

/// Below this many items the parallel path is not worth the split.
#[cfg(feature = "parallel")]
const MIN_PARALLEL_LEN: usize = 64;

pub fn map<T, R, F>(backend: Backend, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if backend == Backend::Parallel && items.len() >= MIN_PARALLEL_LEN {
        return items.par_iter().map(f).collect();
    }
    let _ = backend;
    items.iter().map(f).collect()
}

pub fn map_range<R, F>(backend: Backend, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if backend == Backend::Parallel && n >= 2 {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = backend;
    (0..n).map(f).collect()
}

/// Minimum of `f` over `items`, skipping NaN; ties go to the lowest index.
pub fn argmin<T, F>(backend: Backend, items: &[T], f: F) -> Option<(usize, f64)>
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    let pick = |a: Option<(usize, f64)>, b: Option<(usize, f64)>| match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.1 < x.1 || (y.1 == x.1 && y.0 < x.0) {
                Some(y)
            } else {
                Some(x)
            }
        }
    };
    let lift = |i: usize, v: f64| if v.is_nan() { None } else { Some((i, v)) };

    #[cfg(feature = "parallel")]
    if backend == Backend::Parallel && items.len() >= MIN_PARALLEL_LEN {
        return items
            .par_iter()
            .enumerate()
            .map(|(i, x)| lift(i, f(x)))
            .reduce(|| None, pick);
    }
    let _ = backend;
    items
        .iter()
        .enumerate()
        .fold(None, |acc, (i, x)| pick(acc, lift(i, f(x))))
}

/// First index (in order) satisfying `pred`.
pub fn position<T, F>(backend: Backend, items: &[T], pred: F) -> Option<usize>
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if backend == Backend::Parallel && items.len() >= MIN_PARALLEL_LEN {
        return items.par_iter().position_first(pred);
    }
    let _ = backend;
    items.iter().position(pred)
}
