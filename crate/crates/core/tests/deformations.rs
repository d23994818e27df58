use hyperdeform::boundary::gromov_product;
use hyperdeform::chart::Point;
use hyperdeform::fields::{BasePotential, Bump, BumpOneForm, ConformalBump, Twist};
use hyperdeform::geodesic::distance;
use hyperdeform::hyperbolic::{gromov_closed, hyp_distance, to_complex, IdealPoint};
use hyperdeform::raytransform::{potential_kernel_check, ray_transform, solenoidal_decompose, CdrmDisk, DecomposeOptions};
use hyperdeform::sampling::{crossing_pairs, lines_through, point_pairs};
use hyperdeform::schwarzian::schwarzian_via_limit;
use hyperdeform::variation::distance_variation_check;
use hyperdeform::{MetricFamily, MetricField, OneFormField, SymTensorField};

const TWIST: Twist = Twist { alpha: 0.5, r0: 0.5 };

fn moved(p: Point<f64>) -> Point<f64> {
    let (x, y) = TWIST.apply(1.0, p.x, p.y);
    Point::new(x, y)
}

fn bump_tensor(eps: f64) -> SymTensorField {
    SymTensorField::analytic(ConformalBump { eps, bump: Bump::centered(0.5) })
}

#[test]
fn pullback_distance_is_base_distance_of_images() {
    let g = MetricFamily::pullback(TWIST).metric_at(1.0).unwrap();
    let mut pairs = point_pairs(31, 40, 3.0);
    pairs.extend(crossing_pairs(32, 20, 0.5, 0.9));
    for (p, q) in pairs {
        let d = distance(&g, p, q).unwrap();
        let want = hyp_distance(moved(p), moved(q));
        assert!((d - want).abs() < 1e-7, "{p:?} {q:?}: {d} vs {want}");
    }
}

#[test]
fn pullback_gromov_product_moves_the_basepoint() {
    let g = MetricFamily::pullback(TWIST).metric_at(1.0).unwrap();
    let x = Point::new(0.15, -0.1);
    for (a, b) in [(0.3, 2.5), (1.0, 4.0), (5.0, 5.8)] {
        let (xi, eta) = (IdealPoint::new(a), IdealPoint::new(b));
        let gp = gromov_product(&g, x, xi, eta).unwrap().value;
        let want = gromov_closed(to_complex(moved(x)), xi, eta);
        assert!((gp - want).abs() < 1e-5, "{gp} vs {want}");
    }
}

/// `∫ ε ψ(tanh(s/2)) ds` along a diameter by composite Simpson in arclength.
fn diameter_integral(eps: f64, radius: f64) -> f64 {
    let s_max = 2.0 * radius.atanh();
    let n = 20_000;
    let h = 2.0 * s_max / n as f64;
    let f = |s: f64| eps * Bump::centered(radius).eval((0.5 * s).tanh(), 0.0);
    let mut acc = f(-s_max) + f(s_max);
    for k in 1..n {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(-s_max + k as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn ray_transform_of_conformal_bump_along_a_diameter() {
    let g0 = MetricField::base();
    let h = bump_tensor(0.05);
    for a in [0.0, 0.9, 2.0] {
        let v = ray_transform(&g0, &h, IdealPoint::new(a), IdealPoint::new(a + std::f64::consts::PI)).unwrap().value;
        let want = diameter_integral(0.05, 0.5);
        assert!((v - want).abs() < 1e-9 * (1.0 + want), "{v} vs {want}");
    }
}

#[test]
fn twice_schwarzian_agrees_with_ray_transform_to_second_order() {
    let g0 = MetricField::base();
    let (xi, eta) = (IdealPoint::new(0.2), IdealPoint::new(2.9));
    let defect = |eps: f64| {
        let g = MetricField::perturbed(bump_tensor(eps)).unwrap();
        let s = schwarzian_via_limit(&g0, &g, xi, eta).unwrap().value;
        let i = ray_transform(&g0, &bump_tensor(eps), xi, eta).unwrap().value;
        (2.0 * s - i).abs()
    };
    let (coarse, fine) = (defect(0.02), defect(0.01));
    let ratio = coarse / fine;
    assert!(ratio > 3.2 && ratio < 4.8, "defects {coarse:e} {fine:e}");
}

#[test]
fn distance_variation_on_pullback_family() {
    let family = MetricFamily::pullback(TWIST);
    for (p, q) in crossing_pairs(5, 4, 0.55, 0.85) {
        let row = distance_variation_check(&family, p, q, 0.5, 1e-3).unwrap();
        assert!(row.rel_err < 1e-4, "{row:?}");
    }
}

#[test]
fn potential_tensors_of_perturbed_metric_are_invisible() {
    let g = MetricField::perturbed(bump_tensor(0.05)).unwrap();
    let v = BumpOneForm { bump: Bump { center: [0.1, -0.05], radius: 0.3 }, a: [0.4, -0.2], b: [[0.2, 0.0], [-0.3, 0.1]] };
    let rep = potential_kernel_check(&g, &OneFormField::analytic(v), &lines_through(3, 12, 0.45)).unwrap();
    assert!(rep.max_abs < 1e-6, "{}", rep.max_abs);
}

#[test]
fn decomposition_converges_under_refinement() {
    let disk = CdrmDisk::new(MetricField::base(), 0.7).unwrap();
    let v0 = BumpOneForm { bump: Bump { center: [0.05, -0.1], radius: 0.45 }, a: [-0.3, 0.2], b: [[0.1, 0.2], [0.0, 0.3]] };
    let f = SymTensorField::analytic(BasePotential { v: v0 });
    let rel = |n_r: usize| {
        let opts = DecomposeOptions { n_r, n_theta: 2 * n_r, ..Default::default() };
        solenoidal_decompose(&disk, &f, &opts).unwrap().relative_solenoidal()
    };
    let (coarse, fine) = (rel(16), rel(32));
    assert!(fine < coarse / 2.5, "{coarse:e} -> {fine:e}");
}
