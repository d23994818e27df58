//! Closed-form geometry of the Poincaré disk `g₀ = 4(1−|x|²)⁻² δ`.
//!
//! The generic functions serve as oracles for any scalar type; the complex
//! helpers drive the exact continuation of geodesics outside the support of a
//! perturbation.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::chart::{Point, Sym2};
use crate::error::{GeomError, Result};
use crate::scalar::Real;

/// Conformal factor `λ = 2/(1−|x|²)`, so that `g₀ = λ² δ`.
pub fn conformal_factor<T: Real>(x: T, y: T) -> T {
    T::cst(2.0) / (T::one() - x * x - y * y)
}

pub fn base_metric<T: Real>(x: T, y: T) -> Sym2<T> {
    let l = conformal_factor(x, y);
    Sym2::scalar(l * l)
}

/// Hyperbolic distance in the disk model.
pub fn hyp_distance<T: Real>(p: Point<T>, q: Point<T>) -> T {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let num = (dx * dx + dy * dy).sqrt();
    let den = ((T::one() - p.norm_sq()) * (T::one() - q.norm_sq())).sqrt();
    T::cst(2.0) * (num / den).asinh()
}

/// Hyperbolic radius of the Euclidean circle `|x| = r`.
pub fn hyp_radius(r: f64) -> f64 {
    2.0 * r.atanh()
}

/// Euclidean chart radius of the hyperbolic circle of radius `rh` about 0.
pub fn chart_radius(rh: f64) -> f64 {
    (0.5 * rh).tanh()
}

/// Area of a hyperbolic disk of radius `rh`.
pub fn hyp_disk_area(rh: f64) -> f64 {
    TAU * (rh.cosh() - 1.0)
}

/// A point of the boundary circle at infinity, stored by its angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdealPoint {
    theta: f64,
}

impl IdealPoint {
    pub fn new(theta: f64) -> Self {
        IdealPoint { theta: canonical_angle(theta) }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn unit(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    /// Signed angular offset to `other`, in `(−π, π]`.
    pub fn offset_to(&self, other: &IdealPoint) -> f64 {
        wrap_angle(other.theta - self.theta)
    }

    pub fn rotated(&self, delta: f64) -> Self {
        IdealPoint::new(self.theta + delta)
    }
}

pub fn canonical_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Angle wrapped to `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut t = (a + PI).rem_euclid(TAU) - PI;
    if t <= -PI {
        t += TAU;
    }
    t
}

pub fn to_complex(p: Point<f64>) -> Complex64 {
    Complex64::new(p.x, p.y)
}

pub fn to_point(z: Complex64) -> Point<f64> {
    Point::new(z.re, z.im)
}

/// Disk isometry `T_p(z) = (z − p)/(1 − p̄ z)` sending `p` to the origin.
pub fn mobius(p: Complex64, z: Complex64) -> Complex64 {
    (z - p) / (1.0 - p.conj() * z)
}

/// Inverse of [`mobius`]: `T_p⁻¹(w) = (w + p)/(1 + p̄ w)`.
pub fn mobius_inv(p: Complex64, w: Complex64) -> Complex64 {
    (w + p) / (1.0 + p.conj() * w)
}

/// Complex derivative of `T_p` at `z`.
pub fn mobius_deriv(p: Complex64, z: Complex64) -> Complex64 {
    let d = 1.0 - p.conj() * z;
    (1.0 - p.norm_sqr()) / (d * d)
}

/// State of a unit-speed `g₀`-geodesic: chart position and Euclidean unit
/// direction of the velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypState {
    pub z: Complex64,
    pub u: Complex64,
}

impl HypState {
    pub fn new(z: Complex64, u: Complex64) -> Self {
        HypState { z, u: u / u.norm() }
    }

    /// Chart velocity of unit `g₀`-speed.
    pub fn velocity(&self) -> Complex64 {
        self.u * (0.5 * (1.0 - self.z.norm_sqr()))
    }

    /// State after hyperbolic arclength `s` (negative `s` runs backwards).
    ///
    /// `T_z` has positive real derivative at `z`, so directions at `z` are
    /// carried unchanged to the origin where geodesics are diameters.
    pub fn flow(&self, s: f64) -> HypState {
        let w = self.u * (0.5 * s).tanh();
        let z = mobius_inv(self.z, w);
        let dz = (1.0 - self.z.norm_sqr()) / ((1.0 + self.z.conj() * w) * (1.0 + self.z.conj() * w));
        HypState::new(z, dz * self.u)
    }

    /// `(cosh a, s*)`: `a` is the distance from the origin to the complete
    /// geodesic and `s*` the arclength at which it is attained, so that
    /// `cosh d(0, γ(s)) = cosh a · cosh(s − s*)`.
    pub fn closest_approach(&self) -> (f64, f64) {
        // Hyperboloid coordinates of the origin seen from T_z, rotated so the
        // geodesic is the real axis.
        let c = -self.z * self.u.conj();
        let n = c.norm_sqr();
        let x0 = (1.0 + n) / (1.0 - n);
        let x1 = 2.0 * c.re / (1.0 - n);
        let cosh_a = (x0 * x0 - x1 * x1).max(1.0).sqrt();
        let s_star = (x1 / x0).atanh();
        (cosh_a, s_star)
    }

    /// Arclengths at which the complete geodesic crosses the circle `|x| = rho`,
    /// if it meets it.
    pub fn circle_crossings(&self, rho: f64) -> Option<(f64, f64)> {
        let (cosh_a, s_star) = self.closest_approach();
        let ratio = hyp_radius(rho).cosh() / cosh_a;
        if ratio < 1.0 {
            return None;
        }
        let half = ratio.acosh();
        Some((s_star - half, s_star + half))
    }

    /// Minimal hyperbolic distance from the origin along `s ∈ [s0, s1]`.
    pub fn min_origin_distance(&self, s0: f64, s1: f64) -> f64 {
        let (cosh_a, s_star) = self.closest_approach();
        let s = s_star.clamp(s0, s1);
        (cosh_a * (s - s_star).cosh()).acosh()
    }

    /// Angle of the forward ideal endpoint.
    pub fn forward_ideal(&self) -> IdealPoint {
        IdealPoint::new(mobius_inv(self.z, self.u).arg())
    }

    /// Angle of the backward ideal endpoint.
    pub fn backward_ideal(&self) -> IdealPoint {
        IdealPoint::new(mobius_inv(self.z, -self.u).arg())
    }

    pub fn reversed(&self) -> HypState {
        HypState { z: self.z, u: -self.u }
    }
}

/// Chart direction at `p` of the `g₀`-geodesic toward `q`.
pub fn direction_toward(p: Complex64, q: Complex64) -> Complex64 {
    let w = mobius(p, q);
    w / w.norm()
}

/// Chart direction at `p` of the `g₀`-ray toward the ideal point `xi`.
pub fn direction_toward_ideal(p: Complex64, xi: IdealPoint) -> Complex64 {
    let w = mobius(p, xi.unit());
    w / w.norm()
}

/// Point of the complete `g₀`-geodesic from `eta` to `xi` closest to the
/// origin, with the unit direction pointing toward `xi`.
pub fn line_between_ideals(xi: IdealPoint, eta: IdealPoint) -> Result<HypState> {
    let gap = eta.offset_to(&xi);
    if gap.abs() < 1e-14 {
        return Err(GeomError::DegeneratePair(xi.theta()));
    }
    let a = eta.unit();
    let b = xi.unit();
    let half = 0.5 * gap.abs();
    let mid = a * Complex64::from_polar(1.0, 0.5 * gap);
    let r = (1.0 - half.sin()) / half.cos().max(f64::MIN_POSITIVE);
    let c = if half >= 0.5 * PI - 1e-15 { Complex64::new(0.0, 0.0) } else { mid * r };
    let chord = b - a;
    let u = chord / chord.norm();
    Ok(HypState::new(c, u))
}

/// Busemann function normalized at the origin: `lim d(z, a) − d(0, a)` as
/// `a → ξ`.
pub fn busemann_origin(xi: IdealPoint, z: Complex64) -> f64 {
    ((xi.unit() - z).norm_sqr() / (1.0 - z.norm_sqr())).ln()
}

/// Busemann cocycle `B(ξ, x, y) = lim d(x, a) − d(y, a)`.
pub fn busemann_closed(xi: IdealPoint, x: Complex64, y: Complex64) -> f64 {
    busemann_origin(xi, x) - busemann_origin(xi, y)
}

/// Gromov product of two ideal points based at `x`.
pub fn gromov_closed(x: Complex64, xi: IdealPoint, eta: IdealPoint) -> f64 {
    let at_origin = -(0.5 * (xi.unit() - eta.unit()).norm()).ln();
    at_origin + 0.5 * (busemann_origin(xi, x) + busemann_origin(eta, x))
}

/// Visual distance `exp(−(ξ|η)_x)` of the base metric.
pub fn visual_closed(x: Complex64, xi: IdealPoint, eta: IdealPoint) -> f64 {
    (-gromov_closed(x, xi, eta)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_metric_values() {
        assert_eq!(base_metric(0.0, 0.0), Sym2::scalar(4.0));
        let g = base_metric(0.5_f64, 0.0);
        assert!((g.xx - 64.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn distance_from_origin() {
        let d = hyp_distance(Point::origin(), Point::new(0.5, 0.0));
        assert!((d - 2.0 * 0.5_f64.atanh()).abs() < 1e-15);
        assert!((d - 1.09861228866811).abs() < 1e-12);
        let d32 = hyp_distance(Point::<f32>::origin(), Point::new(0.5, 0.0));
        assert!((d32 as f64 - d).abs() < 1e-6);
    }

    #[test]
    fn flow_from_origin_is_radial() {
        let st = HypState::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0));
        let e = st.flow(2.0);
        assert!((e.z.im - 1.0_f64.tanh()).abs() < 1e-15);
        assert!(e.z.re.abs() < 1e-15);
    }

    #[test]
    fn flow_preserves_distance_and_composes() {
        let st = HypState::new(Complex64::new(0.3, -0.2), Complex64::from_polar(1.0, 2.0));
        let a = st.flow(1.3);
        let d = hyp_distance(to_point(st.z), to_point(a.z));
        assert!((d - 1.3).abs() < 1e-13);
        let b = a.flow(0.9);
        let c = st.flow(2.2);
        assert!((b.z - c.z).norm() < 1e-14);
        assert!((b.u - c.u).norm() < 1e-12);
        let back = st.flow(-0.7);
        assert!((hyp_distance(to_point(st.z), to_point(back.z)) - 0.7).abs() < 1e-13);
        assert!((back.flow(0.7).z - st.z).norm() < 1e-14);
    }

    #[test]
    fn circle_crossings_land_on_circle() {
        let z = Complex64::new(0.9, 0.1);
        let st = HypState::new(z, Complex64::from_polar(1.0, (-z).arg() + 0.05));
        let (s0, s1) = st.circle_crossings(0.55).unwrap();
        assert!((st.flow(s0).z.norm() - 0.55).abs() < 1e-12);
        assert!((st.flow(s1).z.norm() - 0.55).abs() < 1e-12);
        assert!(s0 > 0.0 && s1 > s0);
    }

    #[test]
    fn ideal_endpoints_of_line() {
        let xi = IdealPoint::new(0.4);
        let eta = IdealPoint::new(2.9);
        let l = line_between_ideals(xi, eta).unwrap();
        assert!(l.forward_ideal().offset_to(&xi).abs() < 1e-13);
        assert!(l.backward_ideal().offset_to(&eta).abs() < 1e-13);
        let dia = line_between_ideals(IdealPoint::new(0.0), IdealPoint::new(PI)).unwrap();
        assert!(dia.z.norm() < 1e-15);
    }

    #[test]
    fn gromov_at_origin() {
        let g = gromov_closed(Complex64::new(0.0, 0.0), IdealPoint::new(0.0), IdealPoint::new(PI / 2.0));
        assert!((g + (PI / 4.0).sin().ln()).abs() < 1e-14);
    }

    #[test]
    fn gromov_off_origin() {
        // −log(|T_x ξ − T_x η| / 2) evaluated independently
        let g = gromov_closed(Complex64::new(0.8, 0.1), IdealPoint::new(0.3), IdealPoint::new(2.5));
        assert!((g - 0.294537276943026).abs() < 1e-12, "{g}");
    }
}
