use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use multidir::bishop_phelps::{extremal_point_with, PointCloud};
use multidir::derivative::{multidir_derivative_with, TSchedule};
use multidir::exec::Backend;
use multidir::oracles::{catalog, inf_over_body_with};
use multidir::{ConvexBody, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BACKENDS: [(&str, Backend); 2] = [
    ("sequential", Backend::Sequential),
    ("parallel", Backend::Parallel),
];

fn body() -> ConvexBody {
    ConvexBody::polytope_from(&[&[1.0, 1.0, 0.5], &[2.0, 0.0, 0.0], &[1.0, -1.0, 0.5], &[1.5, 0.0, 1.0]])
        .unwrap()
        .enlarge(0.25)
        .unwrap()
}

fn infimum(c: &mut Criterion) {
    let f = catalog("bowl-plus-max-affine", 3).unwrap().function;
    let body = body();
    let mut g = c.benchmark_group("inf_over_body");
    for (name, backend) in BACKENDS {
        g.bench_function(BenchmarkId::new(name, 24), |b| {
            b.iter(|| inf_over_body_with(backend, &f, black_box(&body), 24).unwrap())
        });
    }
    g.finish();
}

fn derivative(c: &mut Criterion) {
    let f = catalog("bowl-plus-max-affine", 3).unwrap().function;
    let body = body();
    let x = Vector::from_vec(vec![0.3, -0.2, 0.1]);
    let mut g = c.benchmark_group("multidir_derivative");
    for (name, backend) in BACKENDS {
        g.bench_function(BenchmarkId::new(name, 10), |b| {
            b.iter(|| {
                multidir_derivative_with(backend, &f, black_box(&x), &body, TSchedule::default(), 10)
                    .unwrap()
            })
        });
    }
    g.finish();
}

fn orbit(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let pts: Vec<Vector> = (0..2000)
        .map(|_| Vector::from_fn(3, |_, _| rng.gen_range(-3.0..3.0)))
        .collect();
    let cloud = PointCloud::new(pts, 1e-9).unwrap();
    let start = cloud.points()[0].clone();
    let cone_body = ConvexBody::polytope_from(&[&[1.0, 0.2, 0.0], &[1.0, -0.2, 0.1], &[1.0, 0.0, -0.3]]).unwrap();
    let mut g = c.benchmark_group("extremal_point");
    for (name, backend) in BACKENDS {
        g.bench_function(BenchmarkId::new(name, cloud.len()), |b| {
            b.iter(|| extremal_point_with(backend, &cloud, &cone_body, black_box(&start), 1e-9).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, infimum, derivative, orbit);
criterion_main!(benches);
