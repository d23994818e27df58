use std::f64::consts::PI;

use proptest::prelude::*;

use hyperdeform::boundary::{busemann, gromov_product, visual_distance};
use hyperdeform::chart::Point;
use hyperdeform::fields::{Bump, ConformalBump};
use hyperdeform::geodesic::{distance, ideal_endpoint, integrate_ivp};
use hyperdeform::hyperbolic::{busemann_closed, hyp_distance, mobius, to_complex, to_point, IdealPoint};
use hyperdeform::{MetricField, SymTensorField};

fn conformal(eps: f64) -> MetricField {
    MetricField::perturbed(SymTensorField::analytic(ConformalBump { eps, bump: Bump::centered(0.5) })).unwrap()
}

fn point() -> impl Strategy<Value = Point<f64>> {
    (0.0..0.95f64, 0.0..2.0 * PI).prop_map(|(r, a)| Point::polar(r, a))
}

#[test]
fn distance_from_origin_is_twice_artanh() {
    let g0 = MetricField::base();
    for r in [0.01, 0.3, 0.7, 0.95, 0.999] {
        let d = distance(&g0, Point::origin(), Point::polar(r, 1.3)).unwrap();
        assert!((d - 2.0 * f64::atanh(r)).abs() < 1e-12, "r={r}: {d}");
    }
}

#[test]
fn gromov_and_visual_at_origin() {
    let g0 = MetricField::base();
    for (a, b) in [(0.0, PI), (0.2, 1.9), (1.0, 1.3), (5.9, 0.4)] {
        let (xi, eta) = (IdealPoint::new(a), IdealPoint::new(b));
        let s = (0.5 * (a - b)).sin().abs();
        let gp = gromov_product(&g0, Point::origin(), xi, eta).unwrap();
        assert!(gp.converged);
        assert!((gp.value + s.ln()).abs() < 1e-6, "{} vs {}", gp.value, -s.ln());
        let vd = visual_distance(&g0, Point::origin(), xi, eta).unwrap().value;
        assert!((vd - s).abs() < 1e-6);
    }
}

#[test]
fn busemann_matches_horocycle_formula() {
    let g0 = MetricField::base();
    let xi = IdealPoint::new(0.7);
    let (x, y) = (Point::new(0.1, -0.2), Point::new(-0.4, 0.3));
    let b = busemann(&g0, xi, x, y).unwrap().value;
    assert!((b - busemann_closed(xi, to_complex(x), to_complex(y))).abs() < 1e-6);
}

#[test]
fn ivp_on_base_metric_follows_the_diameter() {
    let g0 = MetricField::base();
    // unit speed at the origin is chart speed 1/2
    let path = integrate_ivp(&g0, Point::origin(), [0.5, 0.0], 3.0).unwrap();
    let end = path.end().x;
    assert!((end.x - 1.5f64.tanh()).abs() < 1e-9 && end.y.abs() < 1e-12);
    let xi = ideal_endpoint(&g0, Point::new(0.0, 0.2), [0.0, 0.5 * (1.0 - 0.04)]).unwrap();
    assert!((xi.theta() - 0.5 * PI).abs() < 1e-9);
}

/// `(ξ|η)_x = −log(|T_x ξ − T_x η| / 2)` with `T_x` the isometry sending `x` to 0.
fn gromov_by_isometry(x: Point<f64>, xi: IdealPoint, eta: IdealPoint) -> f64 {
    let xc = to_complex(x);
    -(0.5 * (mobius(xc, xi.unit()) - mobius(xc, eta.unit())).norm()).ln()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gromov_product_off_origin(x in point(), a in 0.0..2.0 * PI, gap in 0.2..6.0f64) {
        prop_assume!(x.norm() < 0.9);
        let (xi, eta) = (IdealPoint::new(a), IdealPoint::new(a + gap));
        let gp = gromov_product(&MetricField::base(), x, xi, eta).unwrap().value;
        prop_assert!((gp - gromov_by_isometry(x, xi, eta)).abs() < 1e-5);
    }

    #[test]
    fn base_distance_is_a_metric(p in point(), q in point(), r in point()) {
        let (dpq, dqp) = (hyp_distance(p, q), hyp_distance(q, p));
        prop_assert!((dpq - dqp).abs() <= 1e-12 * (1.0 + dpq));
        prop_assert!(dpq <= hyp_distance(p, r) + hyp_distance(r, q) + 1e-9);
    }

    #[test]
    fn disk_isometries_preserve_distance(p in point(), q in point(), a in point()) {
        let ac = to_complex(a);
        let (tp, tq) = (to_point(mobius(ac, to_complex(p))), to_point(mobius(ac, to_complex(q))));
        let d = hyp_distance(p, q);
        prop_assert!((hyp_distance(tp, tq) - d).abs() <= 1e-8 * (1.0 + d));
    }

    #[test]
    fn conformal_distance_is_symmetric_and_bracketed(p in point(), q in point()) {
        prop_assume!(hyp_distance(p, q) > 1e-3);
        let eps = 0.05;
        let g = conformal(eps);
        let (dpq, dqp) = (distance(&g, p, q).unwrap(), distance(&g, q, p).unwrap());
        let d0 = hyp_distance(p, q);
        prop_assert!((dpq - dqp).abs() < 1e-8, "{} vs {}", dpq, dqp);
        // g₀ ≤ g ≤ (1 + ε) g₀ pointwise
        prop_assert!(dpq >= d0 - 1e-9 && dpq <= (1.0 + eps).sqrt() * d0 + 1e-9);
    }
}
