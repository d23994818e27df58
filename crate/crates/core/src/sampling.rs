//! Deterministic samplers. Every sampler takes an explicit seed and returns a
//! plain list, so parallel evaluation downstream stays reproducible.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::Point;
use crate::fields::{Bump, BumpOneForm};
use crate::hyperbolic::IdealPoint;

/// Four ideal points for a cross-ratio `[ξ ξ′ η η′]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadruple {
    pub xi: IdealPoint,
    pub xi2: IdealPoint,
    pub eta: IdealPoint,
    pub eta2: IdealPoint,
}

impl Quadruple {
    pub fn angles(&self) -> [f64; 4] {
        [self.xi.theta(), self.xi2.theta(), self.eta.theta(), self.eta2.theta()]
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n_near` quadruples with all angles inside a 0.3 rad window, then
/// `n_spread` roughly antipodal ones.
pub fn quadruples(seed: u64, n_near: usize, n_spread: usize) -> Vec<Quadruple> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(n_near + n_spread);
    for _ in 0..n_near {
        let base = r.gen_range(0.0..TAU);
        // four ordered offsets in [0, 0.3] with gaps of at least 0.03
        let mut gaps = [0.0; 4];
        for g in gaps.iter_mut() {
            *g = r.gen_range(0.0..1.0);
        }
        let total: f64 = gaps.iter().sum();
        let free = 0.3 - 3.0 * 0.03;
        let mut a = [0.0; 4];
        let mut acc = 0.0;
        for k in 0..4 {
            if k > 0 {
                acc += 0.03 + free * gaps[k] / total;
            }
            a[k] = base + acc;
        }
        // alternate so that ξ, η and ξ′, η′ interleave
        out.push(Quadruple {
            xi: IdealPoint::new(a[0]),
            eta: IdealPoint::new(a[1]),
            xi2: IdealPoint::new(a[2]),
            eta2: IdealPoint::new(a[3]),
        });
    }
    for _ in 0..n_spread {
        let base = r.gen_range(0.0..TAU);
        let mut a = [0.0; 4];
        for (k, ak) in a.iter_mut().enumerate() {
            *ak = base + k as f64 * 0.5 * PI + r.gen_range(-0.4..0.4);
        }
        out.push(Quadruple {
            xi: IdealPoint::new(a[0]),
            xi2: IdealPoint::new(a[1]),
            eta: IdealPoint::new(a[2]),
            eta2: IdealPoint::new(a[3]),
        });
    }
    out
}

/// Pairs of ideal points with angular gap in `[min_gap, π]`.
pub fn ideal_pairs(seed: u64, n: usize, min_gap: f64) -> Vec<(IdealPoint, IdealPoint)> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let a = r.gen_range(0.0..TAU);
            let gap = r.gen_range(min_gap..=PI);
            let sign = if r.gen_bool(0.5) { 1.0 } else { -1.0 };
            (IdealPoint::new(a), IdealPoint::new(a + sign * gap))
        })
        .collect()
}

/// Point uniform in hyperbolic area within hyperbolic radius `rh` of the origin.
pub fn hyperbolic_point(r: &mut ChaCha8Rng, rh: f64) -> Point<f64> {
    let u: f64 = r.gen_range(0.0..1.0);
    // area up to radius s is proportional to cosh s − 1
    let s = (1.0 + u * (rh.cosh() - 1.0)).acosh();
    Point::polar((0.5 * s).tanh(), r.gen_range(0.0..TAU))
}

pub fn point_pairs(seed: u64, n: usize, rh: f64) -> Vec<(Point<f64>, Point<f64>)> {
    let mut r = rng(seed);
    (0..n).map(|_| (hyperbolic_point(&mut r, rh), hyperbolic_point(&mut r, rh))).collect()
}

/// Point uniform in chart area within chart radius `radius`.
pub fn chart_point(r: &mut ChaCha8Rng, radius: f64) -> Point<f64> {
    let u: f64 = r.gen_range(0.0..1.0);
    Point::polar(radius * u.sqrt(), r.gen_range(0.0..TAU))
}

/// Complete `g₀`-geodesics whose distance from the origin is uniform in
/// `[0, 0.9 d₀(0, radius)]`, returned as `(ξ, η)` endpoint pairs.
pub fn lines_through(seed: u64, n: usize, radius: f64) -> Vec<(IdealPoint, IdealPoint)> {
    let mut r = rng(seed);
    let reach = 0.9 * crate::hyperbolic::hyp_radius(radius);
    (0..n)
        .map(|_| {
            let a: f64 = r.gen_range(0.0..reach);
            let phi = r.gen_range(0.0..TAU);
            // endpoints of the line at distance a with foot point in direction phi
            let half = a.tanh().acos();
            (IdealPoint::new(phi + half), IdealPoint::new(phi - half))
        })
        .collect()
}

/// Chart points at radius in `[r_min, r_max]` on roughly opposite sides of
/// the origin, so the chord between them crosses a centred support.
pub fn crossing_pairs(seed: u64, n: usize, r_min: f64, r_max: f64) -> Vec<(Point<f64>, Point<f64>)> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let a = r.gen_range(0.0..TAU);
            let b = a + PI + r.gen_range(-0.6..0.6);
            (Point::polar(r.gen_range(r_min..=r_max), a), Point::polar(r.gen_range(r_min..=r_max), b))
        })
        .collect()
}

/// Random bump 1-forms `ψ(x)(a + B(x − c))` with support inside `|x| < reach`.
pub fn bump_one_forms(seed: u64, n: usize, reach: f64) -> Vec<BumpOneForm> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let radius = reach * r.gen_range(0.5..0.8);
            let c = chart_point(&mut r, reach - radius);
            let mut u = || r.gen_range(-1.0..1.0);
            BumpOneForm { bump: Bump { center: [c.x, c.y], radius }, a: [u(), u()], b: [[u(), u()], [u(), u()]] }
        })
        .collect()
}

/// Stratified entry states on the circle `|x| = radius`: boundary angle
/// times direction angle relative to the outward radial direction, jittered
/// within each cell. Directions are Euclidean angles in `(−π/2, π/2)`.
pub fn entry_angles(seed: u64, n_angle: usize, n_dir: usize) -> Vec<(f64, f64)> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(n_angle * n_dir);
    for i in 0..n_angle {
        for j in 0..n_dir {
            let th = (i as f64 + r.gen_range(0.0..1.0)) * TAU / n_angle as f64;
            let d = -0.5 * PI + (j as f64 + r.gen_range(0.0..1.0)) * PI / n_dir as f64;
            out.push((th, d));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_lists_repeat() {
        assert_eq!(quadruples(7, 3, 3), quadruples(7, 3, 3));
        assert_ne!(ideal_pairs(1, 4, 0.1), ideal_pairs(2, 4, 0.1));
    }

    #[test]
    fn lines_pass_within_their_radius() {
        for (xi, eta) in lines_through(5, 40, 0.5) {
            let line = crate::hyperbolic::line_between_ideals(xi, eta).unwrap();
            let (cosh_a, _) = line.closest_approach();
            assert!(cosh_a.acosh() <= 0.9 * crate::hyperbolic::hyp_radius(0.5) + 1e-9);
        }
    }

    #[test]
    fn near_quadruples_fit_their_window() {
        for q in quadruples(3, 50, 0) {
            let a = q.angles();
            let span = q.xi.offset_to(&q.eta2);
            assert!((0.0..=0.3 + 1e-12).contains(&span), "{a:?}");
        }
    }
}
