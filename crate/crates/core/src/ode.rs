//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use crate::error::{GeomError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { atol: 1e-10, rtol: 1e-10, h_max: 0.25, max_steps: 200_000 }
    }
}

impl Tolerance {
    pub fn with_tol(tol: f64) -> Self {
        Tolerance { atol: tol, rtol: tol, ..Default::default() }
    }
}

/// An accepted step, with endpoint derivatives for Hermite interpolation.
#[derive(Clone, Copy, Debug)]
pub struct Step<const N: usize> {
    pub s0: f64,
    pub y0: [f64; N],
    pub f0: [f64; N],
    pub s1: f64,
    pub y1: [f64; N],
    pub f1: [f64; N],
}

impl<const N: usize> Step<N> {
    /// Cubic Hermite interpolant at `s ∈ [s0, s1]`.
    pub fn interpolate(&self, s: f64) -> [f64; N] {
        let h = self.s1 - self.s0;
        let th = (s - self.s0) / h;
        let h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
        let h10 = th * (1.0 - th) * (1.0 - th);
        let h01 = th * th * (3.0 - 2.0 * th);
        let h11 = th * th * (th - 1.0);
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i];
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Copy, Debug)]
pub struct Outcome<const N: usize> {
    pub s: f64,
    pub y: [f64; N],
    pub steps: usize,
    /// True when the observer stopped the integration before `s_end`.
    pub stopped: bool,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Integrates `y' = f(s, y)` from `s0` to `s_end > s0`; `observe` sees every
/// accepted step and may stop the integration early.
pub fn integrate<const N: usize, F, O>(mut f: F, s0: f64, y0: [f64; N], s_end: f64, tol: &Tolerance, mut observe: O) -> Result<Outcome<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    O: FnMut(&Step<N>) -> Control,
{
    let mut s = s0;
    let mut y = y0;
    let mut fy = f(s, &y)?;
    let mut h = (0.05 * (s_end - s0)).min(tol.h_max).min(0.02);
    let mut steps = 0;
    if s_end <= s0 {
        return Ok(Outcome { s, y, steps, stopped: false });
    }
    loop {
        if steps >= tol.max_steps {
            return Err(GeomError::Integrator(format!("step limit {} reached at s = {s}", tol.max_steps)));
        }
        let last = s + h >= s_end;
        let hh = if last { s_end - s } else { h };
        let mut k = [[0.0; N]; 7];
        k[0] = fy;
        let mut failed = None;
        for st in 1..7 {
            let mut yt = y;
            for (i, yi) in yt.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 0..st {
                    acc += A[st][j] * k[j][i];
                }
                *yi += hh * acc;
            }
            match f(s + C[st] * hh, &yt) {
                Ok(v) => k[st] = v,
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed {
            // stage left the domain: shrink and retry
            h = 0.25 * hh;
            if h < 1e-14 {
                return Err(e);
            }
            continue;
        }
        let mut y1 = y;
        for (i, yi) in y1.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..6 {
                acc += A[6][j] * k[j][i];
            }
            *yi += hh * acc;
        }
        // FSAL: the last stage is evaluated at (s + h, y1)
        let f1 = match f(s + hh, &y1) {
            Ok(v) => v,
            Err(e) => {
                h = 0.25 * hh;
                if h < 1e-14 {
                    return Err(e);
                }
                continue;
            }
        };
        k[6] = f1;
        let mut err = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for j in 0..7 {
                e += E[j] * k[j][i];
            }
            let sc = tol.atol + tol.rtol * y[i].abs().max(y1[i].abs());
            err += (hh * e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if err <= 1.0 {
            steps += 1;
            let s1 = if last { s_end } else { s + hh };
            let step = Step { s0: s, y0: y, f0: fy, s1, y1, f1 };
            s = s1;
            y = y1;
            fy = f1;
            if observe(&step) == Control::Stop {
                return Ok(Outcome { s, y, steps, stopped: true });
            }
            if last {
                return Ok(Outcome { s, y, steps, stopped: false });
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (hh * fac).min(tol.h_max);
        } else {
            h = hh * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            if h < 1e-14 {
                return Err(GeomError::Integrator(format!("step size underflow at s = {s}")));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_to_tolerance() {
        let out =
            integrate(|_, y: &[f64; 2]| Ok([y[1], -y[0]]), 0.0, [1.0, 0.0], 10.0, &Tolerance::default(), |_| Control::Continue).unwrap();
        assert!((out.y[0] - 10.0_f64.cos()).abs() < 1e-8);
        assert_eq!(out.s, 10.0);
    }

    #[test]
    fn fifth_order_convergence_at_fixed_tolerance_scaling() {
        let run = |tol: f64| {
            let t = Tolerance::with_tol(tol);
            let o = integrate(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], 1.0, &t, |_| Control::Continue).unwrap();
            ((o.y[0] - 1.0_f64.exp()).abs(), o.steps)
        };
        let (e1, n1) = run(1e-6);
        let (e2, n2) = run(1e-11);
        assert!(e2 < e1 && n2 > n1);
        assert!(e2 < 1e-10);
    }

    #[test]
    fn observer_can_stop() {
        let out = integrate(
            |_, _y: &[f64; 1]| Ok([1.0]),
            0.0,
            [0.0],
            5.0,
            &Tolerance::default(),
            |st| {
                if st.y1[0] > 1.0 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        )
        .unwrap();
        assert!(out.stopped && out.y[0] > 1.0 && out.s < 5.0);
    }

    #[test]
    fn hermite_interpolation_is_third_order() {
        let st = Step { s0: 0.0, y0: [0.0_f64.sin()], f0: [1.0], s1: 0.1, y1: [0.1_f64.sin()], f1: [0.1_f64.cos()] };
        assert!((st.interpolate(0.05)[0] - 0.05_f64.sin()).abs() < 1e-7);
    }
}
