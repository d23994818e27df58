//! Two-point boundary value problem, split by where the endpoints sit relative
//! to the escape disk so that every residual is a well-conditioned angle or
//! chart offset.

use num_complex::Complex64;

use crate::chart::Point;
use crate::error::{GeomError, Result};
use crate::hyperbolic::{direction_toward, hyp_distance, hyp_radius, mobius, to_complex, HypState};
use crate::metric::{check_chart, MetricField};

use super::trace::{GeoState, Trace, Tracer};

/// Residual accepted when the iteration stagnates.
pub const BVP_ACCEPT: f64 = 1e-9;
const BVP_TARGET: f64 = 1e-12;
const BVP_MAX_ITER: usize = 50;
const FD: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BvpKind {
    /// The `g₀` segment avoids the support.
    ClosedForm,
    /// Both endpoints inside the escape disk: shooting on length and angle.
    Interior,
    /// One endpoint inside: shooting on the angle at the inner endpoint,
    /// matched against the direction toward the outer one after exit.
    Mixed,
    /// Both endpoints outside: shooting on the entry point and direction.
    Exterior,
}

#[derive(Clone, Debug)]
pub struct BvpSolution {
    pub length: f64,
    /// Chart angle of the initial velocity at `p`.
    pub angle: f64,
    pub iterations: usize,
    pub residual: f64,
    pub kind: BvpKind,
}

fn norm<const N: usize>(r: &[f64; N]) -> f64 {
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn solve_linear<const N: usize>(j: &[[f64; N]; N], r: &[f64; N]) -> Option<[f64; N]> {
    let mut out = [0.0; N];
    match N {
        1 => {
            if j[0][0] == 0.0 || !j[0][0].is_finite() {
                return None;
            }
            out[0] = -r[0] / j[0][0];
        }
        2 => {
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            out[0] = -(r[0] * j[1][1] - j[0][1] * r[1]) / det;
            out[1] = -(j[0][0] * r[1] - r[0] * j[1][0]) / det;
        }
        _ => unreachable!("only 1- and 2-dimensional systems"),
    }
    Some(out)
}

/// Damped Newton with a forward-difference Jacobian (`j[row][col]`).
fn newton<const N: usize>(
    mut f: impl FnMut(&[f64; N]) -> Result<[f64; N]>,
    mut x: [f64; N],
    max_step: [f64; N],
) -> Result<([f64; N], f64, usize)> {
    let mut r = f(&x)?;
    let mut iterations = 0;
    while iterations < BVP_MAX_ITER && norm(&r) > BVP_TARGET {
        iterations += 1;
        let mut j = [[0.0; N]; N];
        for k in 0..N {
            let mut xh = x;
            xh[k] += FD;
            let rh = f(&xh)?;
            for row in 0..N {
                j[row][k] = (rh[row] - r[row]) / FD;
            }
        }
        let Some(mut step) = solve_linear(&j, &r) else { break };
        let scale = (0..N).map(|k| step[k].abs() / max_step[k]).fold(1.0, f64::max);
        step.iter_mut().for_each(|s| *s /= scale);
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..16 {
            let mut xn = x;
            for k in 0..N {
                xn[k] += lambda * step[k];
            }
            if let Ok(rn) = f(&xn) {
                if norm(&rn) < norm(&r) {
                    x = xn;
                    r = rn;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let res = norm(&r);
    if res > BVP_ACCEPT || !res.is_finite() {
        return Err(GeomError::BvpNoConvergence { iterations, residual: res });
    }
    Ok((x, res, iterations))
}

/// Geodesic from `p` to `q` (as a length and initial chart angle).
pub fn solve_bvp(metric: &MetricField, p: Point<f64>, q: Point<f64>) -> Result<BvpSolution> {
    check_chart(p)?;
    check_chart(q)?;
    let (pc, qc) = (to_complex(p), to_complex(q));
    if (pc - qc).norm() < 1e-14 {
        return Err(GeomError::InvalidInput("distance endpoints coincide".into()));
    }
    let d0 = hyp_distance(p, q);
    let u0 = direction_toward(pc, qc);
    let seg = HypState::new(pc, u0);
    if metric.is_base() || seg.min_origin_distance(0.0, d0) >= hyp_radius(metric.support_radius()) {
        return Ok(BvpSolution { length: d0, angle: u0.arg(), iterations: 0, residual: 0.0, kind: BvpKind::ClosedForm });
    }
    let tracer = Tracer::new(metric);
    let re = tracer.escape_radius;
    let split = match (p.norm() < re, q.norm() < re) {
        (true, true) => return interior(&tracer, p, q, d0, u0.arg()),
        (true, false) => mixed(&tracer, p, q),
        (false, true) => mixed(&tracer, q, p).and_then(|back| {
            // angle at p: reverse the outgoing direction of the q → p solution
            let v = tracer.metric.unit_vector(q, back.angle);
            let tr = tracer.trace(GeoState::new(q, v), None)?;
            let (s_out, h) = tr.outgoing();
            let at_p = h.flow(back.length - s_out);
            Ok(BvpSolution { angle: (-at_p.u).arg(), ..back })
        }),
        (false, false) => exterior(&tracer, p, q, &seg),
    };
    // Endpoints close to the escape circle make the split residuals stiff;
    // plain shooting on length and angle does not care where they sit.
    split.or_else(|e| interior(&tracer, p, q, d0, u0.arg()).map_err(|_| e))
}

fn interior(tracer: &Tracer, p: Point<f64>, q: Point<f64>, d0: f64, a0: f64) -> Result<BvpSolution> {
    let qc = to_complex(q);
    let f = |x: &[f64; 2]| -> Result<[f64; 2]> {
        let v = tracer.metric.unit_vector(p, x[1]);
        let tr = tracer.trace(GeoState::new(p, v), Some(x[0]))?;
        let r = mobius(qc, to_complex(tr.end.x));
        Ok([r.re, r.im])
    };
    let (x, residual, iterations) = newton(f, [d0, a0], [0.5 * d0, 0.5])?;
    Ok(BvpSolution { length: x[0], angle: x[1], iterations, residual, kind: BvpKind::Interior })
}

/// Signed `g₀`-distance from `target` to the line through `z` with chart
/// direction `u`, and whether `target` lies ahead of `z` along it.
///
/// Unlike the bearing toward `target` this stays smooth when `target` is close
/// to `z` and has no wrap-around.
fn line_offset(z: Complex64, u: Complex64, target: Complex64) -> (f64, bool) {
    let w = mobius(z, target) * u.conj() / u.norm();
    ((2.0 * w.im / (1.0 - w.norm_sqr())).asinh(), w.re > 0.0)
}

/// Outgoing state of the geodesic from inside and its offset from `q`.
fn exit_miss(tracer: &Tracer, p: Point<f64>, angle: f64, q: Complex64) -> Result<(f64, bool, Trace)> {
    let v = tracer.metric.unit_vector(p, angle);
    let tr = tracer.trace(GeoState::new(p, v), None)?;
    let (_, h) = tr.outgoing();
    let (off, ahead) = line_offset(h.z, h.u, q);
    Ok((off, ahead, tr))
}

fn mixed(tracer: &Tracer, p: Point<f64>, q: Point<f64>) -> Result<BvpSolution> {
    let qc = to_complex(q);
    let a0 = direction_toward(to_complex(p), qc).arg();
    let f = |x: &[f64; 1]| Ok([exit_miss(tracer, p, x[0], qc)?.0]);
    let (x, residual, iterations) = newton(f, [a0], [0.5])?;
    let (_, ahead, tr) = exit_miss(tracer, p, x[0], qc)?;
    if !ahead {
        return Err(GeomError::BvpNoConvergence { iterations, residual: f64::INFINITY });
    }
    let (s_out, h) = tr.outgoing();
    let length = s_out + hyp_distance(crate::hyperbolic::to_point(h.z), q);
    Ok(BvpSolution { length, angle: x[0], iterations, residual, kind: BvpKind::Mixed })
}

fn exterior(tracer: &Tracer, p: Point<f64>, q: Point<f64>, seg: &HypState) -> Result<BvpSolution> {
    let re = tracer.escape_radius;
    let (pc, qc) = (to_complex(p), to_complex(q));
    let (s_in, _) = seg.circle_crossings(re).ok_or_else(|| GeomError::SolverFailure("segment misses the escape disk".into()))?;
    let e0 = seg.flow(s_in);
    let entry = |x: &[f64; 2]| GeoState::new(Point::polar(re, x[0]), [x[1].cos(), x[1].sin()]);
    let run = |x: &[f64; 2]| -> Result<([f64; 2], Trace)> {
        let st = entry(x);
        let u = Complex64::new(x[1].cos(), x[1].sin());
        let (back, behind) = line_offset(to_complex(st.x), -u, pc);
        let v = tracer.metric.unit_vector(st.x, x[1]);
        let tr = tracer.trace(GeoState::new(st.x, v), None)?;
        let (_, h) = tr.outgoing();
        let (fwd, ahead) = line_offset(h.z, h.u, qc);
        if !(behind && ahead) {
            return Err(GeomError::SolverFailure("shooting left the admissible branch".into()));
        }
        Ok(([back, fwd], tr))
    };
    let (x, residual, iterations) = newton(|x| Ok(run(x)?.0), [e0.z.arg(), e0.u.arg()], [0.3, 0.5])?;
    let (_, tr) = run(&x)?;
    let (s_out, h) = tr.outgoing();
    let e1 = entry(&x).x;
    let length = hyp_distance(p, e1) + s_out + hyp_distance(crate::hyperbolic::to_point(h.z), q);
    let angle = direction_toward(pc, to_complex(e1)).arg();
    Ok(BvpSolution { length, angle, iterations, residual, kind: BvpKind::Exterior })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Bump, ConformalBump, SymTensorField};
    use crate::geodesic::integrate_ivp;

    fn conformal(eps: f64) -> MetricField {
        MetricField::perturbed(SymTensorField::analytic(ConformalBump { eps, bump: Bump::centered(0.5) })).unwrap()
    }

    fn check(g: &MetricField, p: Point<f64>, q: Point<f64>, kind: BvpKind) {
        let s = solve_bvp(g, p, q).unwrap();
        assert_eq!(s.kind, kind);
        let r = solve_bvp(g, q, p).unwrap();
        assert!((s.length - r.length).abs() < 1e-8, "{} vs {}", s.length, r.length);
        if s.length < 12.0 {
            let v = g.unit_vector(p, s.angle);
            let e = integrate_ivp(g, p, v, s.length).unwrap().end().x;
            assert!(hyp_distance(e, q) < 1e-7, "endpoint miss {}", hyp_distance(e, q));
        }
    }

    #[test]
    fn all_configurations_agree_with_ivp() {
        let g = conformal(0.05);
        check(&g, Point::new(-0.4, 0.1), Point::new(0.35, 0.05), BvpKind::Interior);
        check(&g, Point::new(-0.1, 0.1), Point::new(0.8, -0.3), BvpKind::Mixed);
        check(&g, Point::new(-0.7, 0.2), Point::new(0.8, -0.3), BvpKind::Exterior);
    }

    #[test]
    fn far_points_converge() {
        let g = conformal(0.05);
        let r = crate::hyperbolic::chart_radius(12.0);
        let p = Point::polar(r, 0.1);
        let q = Point::polar(r, 3.0);
        let s = solve_bvp(&g, p, q).unwrap();
        assert_eq!(s.kind, BvpKind::Exterior);
        assert!(s.length > hyp_distance(p, q));
    }
}
