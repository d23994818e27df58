//! Points, covectors and symmetric 2-tensors in the unit-disk chart.

use crate::error::{GeomError, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    /// Validated chart point, `|p| < 1`.
    pub fn checked(x: T, y: T) -> Result<Self> {
        let p = Point { x, y };
        if p.norm_sq().re() < 1.0 {
            Ok(p)
        } else {
            Err(GeomError::PointOutsideChart { x: x.re(), y: y.re() })
        }
    }

    pub fn origin() -> Self {
        Point { x: T::zero(), y: T::zero() }
    }

    pub fn norm_sq(&self) -> T {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn coords(&self) -> [T; 2] {
        [self.x, self.y]
    }
}

impl Point<f64> {
    pub fn polar(r: f64, theta: f64) -> Self {
        Point { x: r * theta.cos(), y: r * theta.sin() }
    }
}

/// Covector components `(v₁, v₂)`.
pub type Covector<T> = [T; 2];

/// Symmetric 2×2 matrix stored as its three independent entries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sym2<T> {
    pub xx: T,
    pub xy: T,
    pub yy: T,
}

impl<T: Real> Sym2<T> {
    pub fn new(xx: T, xy: T, yy: T) -> Self {
        Sym2 { xx, xy, yy }
    }

    pub fn zero() -> Self {
        Sym2 { xx: T::zero(), xy: T::zero(), yy: T::zero() }
    }

    pub fn scalar(a: T) -> Self {
        Sym2 { xx: a, xy: T::zero(), yy: a }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        match (i, j) {
            (0, 0) => self.xx,
            (1, 1) => self.yy,
            _ => self.xy,
        }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        Sym2 { xx: f(0, 0), xy: f(0, 1), yy: f(1, 1) }
    }

    pub fn scale(&self, a: T) -> Self {
        Sym2 { xx: self.xx * a, xy: self.xy * a, yy: self.yy * a }
    }

    pub fn add(&self, o: &Self) -> Self {
        Sym2 { xx: self.xx + o.xx, xy: self.xy + o.xy, yy: self.yy + o.yy }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Sym2 { xx: self.xx - o.xx, xy: self.xy - o.xy, yy: self.yy - o.yy }
    }

    pub fn det(&self) -> T {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn trace(&self) -> T {
        self.xx + self.yy
    }

    pub fn inverse(&self) -> Self {
        let inv = self.det().recip();
        Sym2 { xx: self.yy * inv, xy: -self.xy * inv, yy: self.xx * inv }
    }

    /// `Sᵢⱼ uⁱ vʲ`.
    pub fn bilinear(&self, u: [T; 2], v: [T; 2]) -> T {
        self.xx * u[0] * v[0] + self.xy * (u[0] * v[1] + u[1] * v[0]) + self.yy * u[1] * v[1]
    }

    /// `Sᵢⱼ vⁱ vʲ`.
    pub fn quad(&self, v: [T; 2]) -> T {
        self.bilinear(v, v)
    }

    pub fn apply(&self, v: [T; 2]) -> [T; 2] {
        [self.xx * v[0] + self.xy * v[1], self.xy * v[0] + self.yy * v[1]]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.xx.re() > 0.0 && self.det().re() > 0.0
    }

    /// Full contraction `aⁱᵏ aʲˡ uᵢⱼ wₖₗ` with `a` an inverse metric.
    pub fn contract(a: &Self, u: &Self, w: &Self) -> T {
        let mut acc = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        acc += a.get(i, k) * a.get(j, l) * u.get(i, j) * w.get(k, l);
                    }
                }
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.xx.re().abs().max(self.xy.re().abs()).max(self.yy.re().abs())
    }
}

impl Sym2<f64> {
    pub fn to_f32(self) -> Sym2<f32> {
        Sym2 { xx: self.xx as f32, xy: self.xy as f32, yy: self.yy as f32 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_times_matrix_is_identity() {
        let s = Sym2::new(2.0_f64, 0.3, 1.5);
        let i = s.inverse();
        let e = s.apply(i.apply([1.0, 0.0]));
        assert!((e[0] - 1.0).abs() < 1e-15 && e[1].abs() < 1e-15);
    }

    #[test]
    fn contraction_with_identity_is_frobenius() {
        let u = Sym2::new(1.0, 2.0, 3.0);
        let id = Sym2::scalar(1.0);
        assert_eq!(Sym2::contract(&id, &u, &u), 1.0 + 2.0 * 4.0 + 9.0);
    }

    #[test]
    fn chart_rejects_points_on_the_circle() {
        assert!(Point::checked(1.0, 0.0).is_err());
        assert!(Point::checked(0.6_f32, 0.79).is_ok());
    }
}
