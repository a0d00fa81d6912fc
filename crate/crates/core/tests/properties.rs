use multidir::bishop_phelps::{extremal_point, orbit_bound_holds, verify_extremal, PointCloud};
use multidir::bridge::{bridge_subgradient_with, BridgeOptions, PenaltyFunction};
use multidir::derivative::{multidir_derivative, TSchedule};
use multidir::geometry::sample::sample_body;
use multidir::geometry::{
    cone_membership, cone_stats, dist_to_cone, inf_linear, interval_membership, Cone,
    MultiInterval,
};
use multidir::oracles::{catalog, catalog_all, lift, CATALOG_NAMES};
use multidir::witness::lagrange_witness;
use multidir::{ConvexBody, Objective, ScalarFunction, Vector};
use proptest::prelude::*;

const REF: usize = 6;

fn vector(dim: usize, r: f64) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-r..r, dim).prop_map(Vector::from_vec)
}

fn unit(dim: usize) -> impl Strategy<Value = Vector> {
    vector(dim, 1.0)
        .prop_filter("nonzero", |v| v.norm() > 0.1)
        .prop_map(|v| v.normalize())
}

/// Polytope with 1..=5 vertices in `{v·u ≥ 0.2}`, so `0 ∉ A`.
fn polytope_beyond(dim: usize, u: Vector) -> impl Strategy<Value = ConvexBody> {
    prop::collection::vec((vector(dim, 3.0), 0.0..1.0f64), 1..=5).prop_map(move |vs| {
        let vertices = vs
            .into_iter()
            .map(|(v, lift)| {
                let h = v.dot(&u);
                if h < 0.2 {
                    &v + &u * (0.2 - h + lift)
                } else {
                    v
                }
            })
            .collect();
        ConvexBody::polytope(vertices).unwrap()
    })
}

fn polytope_away(dim: usize) -> impl Strategy<Value = ConvexBody> {
    unit(dim).prop_flat_map(move |u| polytope_beyond(dim, u))
}

/// Any polytope in `[-3, 3]ⁿ`.
fn polytope(dim: usize) -> impl Strategy<Value = ConvexBody> {
    prop::collection::vec(vector(dim, 3.0), 1..=5)
        .prop_map(|vs| ConvexBody::polytope(vs).unwrap())
}

fn dim() -> impl Strategy<Value = usize> {
    2usize..=3
}

/// Convex combination of the vertices with the given raw weights.
fn combine(body: &ConvexBody, w: &[f64]) -> Vector {
    let vs = body.polyhedral_vertices().unwrap();
    let total: f64 = vs.iter().zip(w.iter().cycle()).map(|(_, x)| x + 1e-3).sum();
    vs.iter()
        .zip(w.iter().cycle())
        .fold(Vector::zeros(vs[0].len()), |acc, (v, x)| acc + v * ((x + 1e-3) / total))
}

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, 5)
}

fn entry(dim: usize) -> impl Strategy<Value = multidir::oracles::CatalogEntry> {
    (0..CATALOG_NAMES.len()).prop_map(move |i| catalog(CATALOG_NAMES[i], dim).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cone_translation_identity(
        (a, body, x) in dim().prop_flat_map(|d| (vector(d, 3.0), polytope(d), vector(d, 6.0)))
    ) {
        prop_assume!(!body.contains(&a, 1e-6));
        let cone = Cone::new(a.clone(), &body).unwrap();
        let at_origin = Cone::new(Vector::zeros(a.len()), &body.translate(&-&a)).unwrap();
        prop_assert_eq!(
            cone_membership(&cone, &x, 1e-9),
            cone_membership(&at_origin, &(&x - &a), 1e-9)
        );
    }

    #[test]
    fn interval_is_star_shaped(
        (a, body, w, t) in dim().prop_flat_map(|d| (vector(d, 3.0), polytope(d), weights(), 0.0..1.0f64)),
        s in prop::collection::vec(0.0..=1.0f64, 8),
    ) {
        let iv = MultiInterval::new(a.clone(), body.clone()).unwrap();
        let x = &a + (combine(&body, &w) - &a) * t;
        prop_assert!(interval_membership(&iv, &x, 1e-9));
        for s in s {
            let y = &a + (&x - &a) * s;
            prop_assert!(interval_membership(&iv, &y, 1e-9), "s = {}", s);
        }
    }

    #[test]
    fn interval_limits_stay_inside(
        (a, body, w, t) in dim().prop_flat_map(|d| (vector(d, 3.0), polytope(d), weights(), 0.0..=1.0f64)),
    ) {
        // members a + t_k (y_k − a) with t_k → t and y_k → y
        let iv = MultiInterval::new(a.clone(), body.clone()).unwrap();
        let y = combine(&body, &w);
        let vs = body.polyhedral_vertices().unwrap();
        for k in 1..=12 {
            let h = 0.5f64.powi(k);
            let yk = &y * (1.0 - h) + &vs[0] * h;
            let tk = t * (1.0 - h);
            prop_assert!(iv.contains(&(&a + (&yk - &a) * tk), 1e-9));
        }
        prop_assert!(iv.distance(&(&a + (&y - &a) * t)) <= 1e-9);
    }

    #[test]
    fn cone_sum_inequality(
        (body, ws) in dim().prop_flat_map(|d| (
            polytope_away(d),
            prop::collection::vec((weights(), 0.0..5.0f64), 1..=20),
        )),
    ) {
        let c = cone_stats(&body, 1e-9).unwrap().c;
        let xs: Vec<Vector> = ws.iter().map(|(w, t)| combine(&body, w) * *t).collect();
        let sum = xs.iter().fold(Vector::zeros(body.dim()), |acc, x| acc + x);
        let total: f64 = xs.iter().map(|x| x.norm()).sum();
        prop_assert!(sum.norm() >= c * total - 1e-9);
    }

    #[test]
    fn inf_linear_bounds_samples(
        (body, p) in dim().prop_flat_map(|d| (
            prop_oneof![
                polytope(d),
                (vector(d, 3.0), 0.0..2.0f64).prop_map(|(c, r)| ConvexBody::ball(c, r).unwrap()),
                (polytope(d), 0.0..1.0f64).prop_map(|(b, e)| b.enlarge(e).unwrap()),
            ],
            vector(d, 5.0),
        )),
    ) {
        let lo = inf_linear(&body, &p);
        for y in sample_body(&body, REF) {
            prop_assert!(p.dot(&y) >= lo - 1e-9 * (1.0 + lo.abs()));
        }
    }

    #[test]
    fn zero_distance_iff_member(
        (body, x, w, t) in dim().prop_flat_map(|d| (polytope_away(d), vector(d, 6.0), weights(), 0.0..4.0f64)),
    ) {
        let cone = Cone::new(Vector::zeros(body.dim()), &body).unwrap();
        for z in [x.clone(), combine(&body, &w) * t] {
            let tol = 1e-9;
            prop_assert_eq!(dist_to_cone(&z, &cone) <= tol, cone_membership(&cone, &z, tol));
        }
    }

    #[test]
    fn gradients_match_finite_differences((e, x) in dim().prop_flat_map(|d| (entry(d), vector(d, 2.0)))) {
        prop_assume!(e.smooth);
        let g = &e.function.subdifferential(&x).generators[0];
        let h = 1e-6;
        for i in 0..x.len() {
            let mut up = x.clone();
            let mut dn = x.clone();
            up[i] += h;
            dn[i] -= h;
            let fd = (e.function.value(&up) - e.function.value(&dn)) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() <= 1e-5 * (1.0 + g[i].abs()), "{} {} vs {}", e.name, fd, g[i]);
        }
    }

    #[test]
    fn convex_subgradient_inequality(
        (e, x, ys) in dim().prop_flat_map(|d| (entry(d), vector(d, 3.0), prop::collection::vec(vector(d, 3.0), 8))),
    ) {
        prop_assume!(e.convex);
        let fx = e.function.value(&x);
        for q in e.function.subdifferential(&x).generators {
            for y in &ys {
                let fy = e.function.value(y);
                prop_assert!(fy >= fx + q.dot(&(y - &x)) - 1e-9 * (1.0 + fy.abs()), "{}", e.name);
            }
        }
    }

    #[test]
    fn lifted_derivative_identity(
        (e, body, x, t, kappa) in dim().prop_flat_map(|d| (
            entry(d), polytope(d), vector(d, 2.0), -1.0..1.0f64, -3.0..3.0f64,
        )),
    ) {
        let lp = lift(&e.function, kappa);
        let base = multidir_derivative(&e.function, &x, &body, TSchedule::default(), REF).unwrap();
        let lifted = multidir_derivative(
            &lp.function,
            &x.clone().push(t),
            &lp.lift_body(&body).unwrap(),
            TSchedule::default(),
            REF,
        )
        .unwrap();
        let gap = (lifted.estimate - (base.estimate - kappa)).abs();
        prop_assert!(gap <= 2e-3 || !base.estimate.is_finite(), "{} gap {}", e.name, gap);
    }

    #[test]
    fn smooth_estimate_is_the_gradient_pairing(
        (e, body, x) in dim().prop_flat_map(|d| (entry(d), polytope(d), vector(d, 2.0))),
    ) {
        prop_assume!(e.smooth);
        let est = multidir_derivative(&e.function, &x, &body, TSchedule::default(), REF).unwrap();
        let g = &e.function.subdifferential(&x).generators[0];
        let exact = sample_body(&body, REF).iter().map(|a| g.dot(a)).fold(f64::INFINITY, f64::min);
        prop_assert!((est.estimate - exact).abs() <= 1e-4, "{}: {} vs {}", e.name, est.estimate, exact);
    }

    #[test]
    fn linear_estimate_scales_exactly(
        (p, body, x) in dim().prop_flat_map(|d| (vector(d, 3.0), polytope(d), vector(d, 2.0))),
        k in 0u32..4,
    ) {
        let f = ScalarFunction::linear(p.clone());
        let mu = 2f64.powi(k as i32);
        let base = multidir_derivative(&f, &x, &body, TSchedule::default(), REF).unwrap();
        let scaled = multidir_derivative(&f, &x, &body.scale(mu), TSchedule::default(), REF).unwrap();
        // exact up to the cancellation in (f(x + ta) − f(x))/t at the smallest t
        let s = TSchedule::default();
        let t_min = s.t(s.steps - 1);
        let size = f.value(&x).abs() + mu * body.sup_norm() * p.norm();
        let rounding = 8.0 * f64::EPSILON * (1.0 + size) / t_min;
        prop_assert!((scaled.estimate - mu * base.estimate).abs() <= rounding * (1.0 + mu));
    }

    #[test]
    fn wider_tail_never_raises_the_estimate(
        (e, body, x) in dim().prop_flat_map(|d| (entry(d), polytope(d), vector(d, 2.0))),
        m in 1usize..20,
    ) {
        let est = multidir_derivative(&e.function, &x, &body, TSchedule::default(), REF).unwrap();
        prop_assert!(est.tail_min(m + 1) <= est.tail_min(m));
    }

    #[test]
    fn apex_averaging(
        (e, body, a, x, w, s) in dim().prop_flat_map(|d| (
            entry(d), polytope(d), vector(d, 3.0), vector(d, 2.0), weights(), 0.0..0.9f64,
        )),
    ) {
        // a′ = (1−s)a + s·y with y ∈ A gives A − a′ ⊇ (1−s)(A − a)
        prop_assume!(e.smooth);
        let a2 = &a * (1.0 - s) + combine(&body, &w) * s;
        let d = |apex: &Vector| {
            multidir_derivative(&e.function, &x, &body.translate(&-apex), TSchedule::default(), REF)
                .unwrap()
                .estimate
        };
        let (da, da2) = (d(&a), d(&a2));
        prop_assert!((1.0 - s) * da >= da2 - 1e-3, "{}: {} vs {}", e.name, da, da2);
        if da2 >= 0.0 {
            prop_assert!(da >= da2 - 1e-3);
        }
    }

    #[test]
    fn orbits_are_extremal_bounded_and_deterministic(
        (body, pts, start) in dim().prop_flat_map(|d| (
            polytope_away(d),
            prop::collection::vec(vector(d, 3.0), 1..200),
            any::<prop::sample::Index>(),
        )),
    ) {
        let cloud = PointCloud::new(pts, 1e-9).unwrap();
        let x0 = cloud.points()[start.index(cloud.len())].clone();
        let (x, trace) = extremal_point(&cloud, &body, &x0, 1e-9).unwrap();
        prop_assert!(verify_extremal(&cloud, &body, &x, 1e-9).is_none());
        prop_assert!(orbit_bound_holds(&trace, &body, 1e-9).unwrap());
        prop_assert!(trace.points.len() <= cloud.len());
        let (x2, trace2) = extremal_point(&cloud, &body, &x0, 1e-9).unwrap();
        prop_assert_eq!(x, x2);
        prop_assert_eq!(trace, trace2);
    }

    #[test]
    fn penalty_is_convex_and_cone_monotone(
        (body, apex, x, y, w, t, l, n) in dim().prop_flat_map(|d| (
            polytope_away(d), vector(d, 2.0), vector(d, 4.0), vector(d, 4.0),
            weights(), 0.0..3.0f64, 0.0..=1.0f64, 1.0..100.0f64,
        )),
    ) {
        let psi = PenaltyFunction::new(n, Cone::from_directions(apex, body.clone()));
        let scale = 1.0 + psi.value(&x) + psi.value(&y);
        let mid = &x * l + &y * (1.0 - l);
        prop_assert!(psi.value(&mid) <= l * psi.value(&x) + (1.0 - l) * psi.value(&y) + 1e-7 * scale);
        let c = combine(&body, &w) * t;
        prop_assert!(psi.value(&(&x + c)) <= psi.value(&x) + 1e-7 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bridge_pairing_bound(
        (x, u_body) in dim().prop_flat_map(|d| (vector(d, 2.0), unit(d)))
            .prop_flat_map(|(x, u)| {
                let d = x.len();
                (Just(x), polytope_beyond(d, u))
            }),
    ) {
        // bowl with directions where its gradient pairs positively
        let f = ScalarFunction::bowl(x.len());
        let g = &x * 2.0;
        prop_assume!(g.norm() > 0.2);
        prop_assume!(inf_linear(&u_body, &g) > 0.05 * g.norm() + 0.1);
        let opts = BridgeOptions { refinement: REF, ..BridgeOptions::default() };
        let out = bridge_subgradient_with(&f, &x, &u_body, 0.05, 0.1, opts).unwrap();
        for step in out.steps.iter().filter(|s| s.accepted) {
            prop_assert!(step.pairing >= step.pairing_lower - 1e-9 * (1.0 + step.pairing.abs()));
            prop_assert!(step.pairing > -0.1);
        }
        prop_assert!(out.steps.iter().any(|s| s.accepted));
    }
}

#[test]
fn restricted_function_on_a_grid() {
    let e = catalog("restricted-bowl", 2).unwrap();
    let base = catalog("shifted-bowl", 2).unwrap();
    for i in -48..=48 {
        for j in -48..=48 {
            let x = Vector::from_vec(vec![i as f64 * 0.25, j as f64 * 0.25]);
            let v = e.function.value(&x);
            if x.norm() <= 10.0 {
                assert_eq!(v, base.function.value(&x), "{x:?}");
            } else {
                assert_eq!(v, f64::INFINITY, "{x:?}");
            }
        }
    }
}

#[test]
fn doubling_the_grid_degrades_gracefully() {
    for dim in [2, 3] {
        let a = Vector::zeros(dim);
        for e in catalog_all(dim) {
            for (name, body) in multidir::geometry::standard_bodies(dim) {
                let f = &e.function;
                let r = multidir::oracles::inf_over_body(f, &body, 5)
                    .unwrap()
                    .min(multidir::oracles::inf_over_body(f, &body, 10).unwrap());
                let coarse = lagrange_witness(f, &a, &body, r, 5, 1e-6).unwrap();
                if !coarse.verified {
                    continue;
                }
                let fine = lagrange_witness(f, &a, &body, r, 10, 1e-6).unwrap();
                assert!(
                    fine.slack >= -1e-3 && fine.f_at_witness <= fine.bound_checked + 1e-6,
                    "{}/{name}/R{dim}: slack {}",
                    e.name,
                    fine.slack
                );
            }
        }
    }
}

#[test]
fn dual_flags_are_reproducible_from_the_report() {
    use multidir::bridge::clarke_ledyaev_dual;
    for name in ["linear", "bowl", "max-affine"] {
        let e = catalog(name, 2).unwrap();
        let body = multidir::geometry::standard_bodies(2)[1].1.clone();
        let a = Vector::zeros(2);
        let f = &e.function;
        let r = multidir::oracles::inf_over_body(f, &body, 8).unwrap() - 0.1;
        let rep = clarke_ledyaev_dual(f, &a, &body, r, 0.2, 8, 0).unwrap();
        let iv = MultiInterval::new(a.clone(), body.clone()).unwrap();
        assert_eq!(rep.membership, iv.distance(&rep.xi) < rep.eps, "{name}");
        assert_eq!(rep.value_bound, f.value(&a).max(r) + rep.eps > f.value(&rep.xi), "{name}");
        assert_eq!(
            rep.pairing_bound,
            inf_linear(&body, &rep.p) - rep.p.dot(&a) > r - f.value(&a),
            "{name}"
        );
        assert!(f.contains_subgradient(&rep.xi, &rep.p, 1e-9), "{name}");
        let again = clarke_ledyaev_dual(f, &a, &body, r, 0.2, 8, 0).unwrap();
        assert_eq!(rep, again, "{name}");
    }
}
