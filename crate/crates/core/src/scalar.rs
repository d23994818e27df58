//! Scalar abstraction shared by the closed-form geometry and the forward-mode
//! derivative type used to differentiate built-in fields exactly.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{Float, One, Zero};

/// Real scalar usable by the generic field formulas.
///
/// Implemented for `f32`, `f64` and for [`Jet`] over any `Real`, so a field
/// written once as `fn eval<T: Real>` can be evaluated plainly or
/// differentiated to any nesting depth.
pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
    + 'static
{
    fn cst(v: f64) -> Self;
    /// Value part (drops all derivative information).
    fn re(self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn asinh(self) -> Self;
    fn recip(self) -> Self {
        Self::one() / self
    }
    fn powi(self, n: i32) -> Self {
        let mut acc = Self::one();
        let base = if n < 0 { self.recip() } else { self };
        for _ in 0..n.unsigned_abs() {
            acc *= base;
        }
        acc
    }
}

macro_rules! impl_real_float {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn cst(v: f64) -> Self {
                v as $t
            }
            #[inline]
            fn re(self) -> f64 {
                self as f64
            }
            #[inline]
            fn exp(self) -> Self {
                Float::exp(self)
            }
            #[inline]
            fn ln(self) -> Self {
                Float::ln(self)
            }
            #[inline]
            fn sqrt(self) -> Self {
                Float::sqrt(self)
            }
            #[inline]
            fn sin(self) -> Self {
                Float::sin(self)
            }
            #[inline]
            fn cos(self) -> Self {
                Float::cos(self)
            }
            #[inline]
            fn asinh(self) -> Self {
                Float::asinh(self)
            }
            #[inline]
            fn recip(self) -> Self {
                Float::recip(self)
            }
            #[inline]
            fn powi(self, n: i32) -> Self {
                Float::powi(self, n)
            }
        }
    };
}

impl_real_float!(f32);
impl_real_float!(f64);

/// First-order jet in two directions: value plus two directional derivatives.
///
/// Nesting `Jet<Jet<f64>>` yields second derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T> {
    pub v: T,
    pub d: [T; 2],
}

impl<T: Real> Jet<T> {
    pub fn constant(v: T) -> Self {
        Jet { v, d: [T::zero(); 2] }
    }

    /// Independent variable seeded in direction `slot`.
    pub fn var(v: T, slot: usize) -> Self {
        let mut d = [T::zero(); 2];
        d[slot] = T::one();
        Jet { v, d }
    }

    #[inline]
    fn chain(self, fv: T, dfv: T) -> Self {
        Jet { v: fv, d: [dfv * self.d[0], dfv * self.d[1]] }
    }
}

impl<T: Real> PartialOrd for Jet<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.v.partial_cmp(&other.v)
    }
}

impl<T: Real> Zero for Jet<T> {
    fn zero() -> Self {
        Jet::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero() && self.d[0].is_zero() && self.d[1].is_zero()
    }
}

impl<T: Real> One for Jet<T> {
    fn one() -> Self {
        Jet::constant(T::one())
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Jet { v: self.v + o.v, d: [self.d[0] + o.d[0], self.d[1] + o.d[1]] }
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Jet { v: self.v - o.v, d: [self.d[0] - o.d[0], self.d[1] - o.d[1]] }
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Jet { v: self.v * o.v, d: [self.d[0] * o.v + self.v * o.d[0], self.d[1] * o.v + self.v * o.d[1]] }
    }
}

impl<T: Real> Div for Jet<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = o.v.recip();
        let q = self.v * inv;
        Jet { v: q, d: [(self.d[0] - q * o.d[0]) * inv, (self.d[1] - q * o.d[1]) * inv] }
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Jet { v: -self.v, d: [-self.d[0], -self.d[1]] }
    }
}

impl<T: Real> AddAssign for Jet<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Jet<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> MulAssign for Jet<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Real> Real for Jet<T> {
    fn cst(v: f64) -> Self {
        Jet::constant(T::cst(v))
    }
    fn re(self) -> f64 {
        self.v.re()
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.v.ln(), self.v.recip())
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, (T::cst(2.0) * s).recip())
    }
    fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn asinh(self) -> Self {
        let dv = (T::one() + self.v * self.v).sqrt().recip();
        self.chain(self.v.asinh(), dv)
    }
    fn recip(self) -> Self {
        let r = self.v.recip();
        self.chain(r, -(r * r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f<T: Real>(x: T, y: T) -> T {
        (x * y).sin() + (x * x).exp() / (T::one() + y * y).sqrt() - x.ln() * y.powi(3)
    }

    #[test]
    fn jet_matches_hand_derivatives() {
        let (x, y) = (0.7_f64, -0.4_f64);
        let j = f(Jet::var(x, 0), Jet::var(y, 1));
        let dx = y * (x * y).cos() + 2.0 * x * (x * x).exp() / (1.0 + y * y).sqrt() - y.powi(3) / x;
        let dy = x * (x * y).cos() - (x * x).exp() * y / (1.0 + y * y).powf(1.5) - 3.0 * x.ln() * y * y;
        assert!((j.v - f(x, y)).abs() < 1e-15);
        assert!((j.d[0] - dx).abs() < 1e-13);
        assert!((j.d[1] - dy).abs() < 1e-13);
    }

    #[test]
    fn nested_jet_gives_mixed_second_derivative() {
        let g = |x: Jet<Jet<f64>>, y: Jet<Jet<f64>>| x * x * y + y.sin();
        let (x0, y0) = (0.3, 1.1);
        let x = Jet { v: Jet::var(x0, 0), d: [Jet::constant(1.0), Jet::constant(0.0)] };
        let y = Jet { v: Jet::var(y0, 1), d: [Jet::constant(0.0), Jet::constant(1.0)] };
        let r = g(x, y);
        assert!((r.d[0].d[1] - 2.0 * x0).abs() < 1e-14);
        assert!((r.d[0].d[0] - 2.0 * y0).abs() < 1e-14);
        assert!((r.d[1].d[1] + y0.sin()).abs() < 1e-14);
    }

    #[test]
    fn f32_and_f64_agree() {
        let a = f(0.5_f32, 0.25_f32) as f64;
        let b = f(0.5_f64, 0.25_f64);
        assert!((a - b).abs() < 1e-5);
    }
}
