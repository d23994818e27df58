//! Geodesics of a perturbed disk metric: initial value problems, two-point
//! distances, rays to ideal points and complete geodesics between ideal points.

mod bvp;
mod path;
mod trace;

pub use bvp::{solve_bvp, BvpKind, BvpSolution, BVP_ACCEPT};
pub use path::{GeodesicPath, PathSample};
pub use trace::{escape_radius, GeoState, Trace, Tracer, ESCAPE_MARGIN};

use crate::chart::Point;
use crate::error::{GeomError, Result};
use crate::hyperbolic::{direction_toward_ideal, hyp_radius, line_between_ideals, to_complex, wrap_angle, HypState, IdealPoint};
use crate::metric::{check_chart, MetricField};
use crate::ode::{integrate, Control, Tolerance};

/// Closest approach to the boundary tolerated by a plain integration.
pub const CHART_SAFETY: f64 = 1e-6;

/// Samples per closed-form piece of a path.
const CLOSED_SAMPLES: usize = 32;

const FD_ANGLE: f64 = 1e-7;

pub(crate) fn unit_check(metric: &MetricField, x: Point<f64>, v: [f64; 2]) -> Result<()> {
    check_chart(x)?;
    let n = metric.value(x).quad(v);
    if (n - 1.0).abs() > 1e-8 {
        return Err(GeomError::InvalidInput(format!("initial velocity has g(v,v) = {n}, expected 1")));
    }
    Ok(())
}

/// Integrates the geodesic equation from `(x, v)` for arclength `length`,
/// recording every accepted step.
pub fn integrate_ivp(metric: &MetricField, x: Point<f64>, v: [f64; 2], length: f64) -> Result<GeodesicPath> {
    integrate_ivp_with(metric, x, v, length, &Tolerance::default())
}

pub fn integrate_ivp_with(metric: &MetricField, x: Point<f64>, v: [f64; 2], length: f64, tol: &Tolerance) -> Result<GeodesicPath> {
    unit_check(metric, x, v)?;
    let limit = (1.0 - CHART_SAFETY) * (1.0 - CHART_SAFETY);
    let mut path = GeodesicPath::empty();
    path.push_state(metric, 0.0, GeoState::new(x, v));
    let mut escaped = None;
    let mut states = Vec::new();
    let dir = if length < 0.0 { -1.0 } else { 1.0 };
    let out = integrate(
        |_, y: &[f64; 4]| {
            let p = Point::new(y[0], y[1]);
            if p.norm_sq() >= 1.0 {
                return Err(GeomError::PointOutsideChart { x: p.x, y: p.y });
            }
            let (a, _) = metric.acceleration(p, [y[2], y[3]]);
            Ok([y[2], y[3], a[0], a[1]])
        },
        0.0,
        [x.x, x.y, dir * v[0], dir * v[1]],
        length.abs(),
        tol,
        |st| {
            let y = st.y1;
            let r2 = y[0] * y[0] + y[1] * y[1];
            if r2 > limit {
                escaped = Some(r2.sqrt());
                return Control::Stop;
            }
            states.push((st.s1, y));
            Control::Continue
        },
    )?;
    if let Some(radius) = escaped {
        return Err(GeomError::ChartEscape { radius });
    }
    for (s, y) in states {
        path.push_state(metric, dir * s, GeoState::new(Point::new(y[0], y[1]), [dir * y[2], dir * y[3]]));
    }
    debug_assert!(out.s == length.abs());
    if metric.is_base() || path.end().x.norm() > metric.support_radius() {
        let e = *path.end();
        if !metric.is_base() && e.x.x * e.v[0] + e.x.y * e.v[1] > 0.0 {
            path.forward_exit = Some((e.s, GeoState::new(e.x, e.v)));
            path.forward_ideal = Some(GeoState::new(e.x, e.v).to_hyp().forward_ideal());
        }
    }
    Ok(path)
}

/// Riemannian distance `d_g(p, q)`.
pub fn distance(metric: &MetricField, p: Point<f64>, q: Point<f64>) -> Result<f64> {
    Ok(solve_bvp(metric, p, q)?.length)
}

/// Minimizing geodesic from `p` to `q` together with its length.
pub fn geodesic_between(metric: &MetricField, p: Point<f64>, q: Point<f64>) -> Result<(f64, GeodesicPath)> {
    let sol = solve_bvp(metric, p, q)?;
    let v = metric.unit_vector(p, sol.angle);
    let tracer = Tracer::new(metric).recording();
    let tr = tracer.trace(GeoState::new(p, v), Some(sol.length))?;
    let mut path = GeodesicPath::empty();
    path.push_trace(metric, &tr, 0.0, CLOSED_SAMPLES);
    Ok((sol.length, path))
}

/// Forward ideal endpoint of the geodesic from `(x, v)`.
///
/// Fails with `NotEscaped` when the geodesic does not leave the support with
/// outward radial velocity.
pub fn ideal_endpoint(metric: &MetricField, x: Point<f64>, v: [f64; 2]) -> Result<IdealPoint> {
    unit_check(metric, x, v)?;
    let tr = Tracer::new(metric).trace(GeoState::new(x, v), None).map_err(|e| match e {
        GeomError::Integrator(_) => GeomError::NotEscaped { radius: x.norm(), radial: 0.0 },
        other => other,
    })?;
    tr.forward_ideal().ok_or(GeomError::NotEscaped { radius: tr.end.x.norm(), radial: tr.end.radial_velocity() })
}

/// Geodesic ray from `x` to the ideal point `xi`, found by shooting on the
/// initial angle.
#[derive(Clone, Debug)]
pub struct Ray {
    pub start: Point<f64>,
    pub target: IdealPoint,
    pub angle: f64,
    pub trace: Trace,
    /// Angular miss of the forward endpoint.
    pub miss: f64,
}

impl Ray {
    /// State at arclength `s ≥ 0`.
    pub fn state_at(&self, metric: &MetricField, s: f64) -> Result<GeoState> {
        if let Some(st) = self.trace.far_point(s) {
            return Ok(st);
        }
        let v = metric.unit_vector(self.start, self.angle);
        Ok(Tracer::new(metric).trace(GeoState::new(self.start, v), Some(s))?.end)
    }

    pub fn point_at(&self, metric: &MetricField, s: f64) -> Result<Point<f64>> {
        Ok(self.state_at(metric, s)?.x)
    }

    /// Sampled path out to arclength `tail` past the final exit.
    pub fn to_path(&self, metric: &MetricField, tail: f64) -> Result<GeodesicPath> {
        let v = metric.unit_vector(self.start, self.angle);
        let tr = Tracer::new(metric).recording().trace(GeoState::new(self.start, v), None)?;
        let (s_out, h) = tr.outgoing();
        let mut path = GeodesicPath::empty();
        path.push_trace(metric, &tr, 0.0, CLOSED_SAMPLES);
        path.push_closed(metric, &h, s_out, s_out, s_out + tail, CLOSED_SAMPLES);
        path.forward_exit = Some((s_out, GeoState::from_hyp(&h)));
        path.forward_ideal = Some(h.forward_ideal());
        Ok(path)
    }
}

const RAY_TOL: f64 = 1e-11;

/// Ray from `x` to `xi`.
pub fn ray_from(metric: &MetricField, x: Point<f64>, xi: IdealPoint) -> Result<Ray> {
    check_chart(x)?;
    let xc = to_complex(x);
    let u0 = direction_toward_ideal(xc, xi);
    let tracer = Tracer::new(metric);
    let support = metric.support_radius();
    let h0 = HypState::new(xc, u0);
    if metric.is_base() || (x.norm() >= support && h0.min_origin_distance(0.0, f64::INFINITY) >= hyp_radius(support)) {
        let trace = tracer.trace(GeoState::from_hyp(&h0), None)?;
        return Ok(Ray { start: x, target: xi, angle: u0.arg(), trace, miss: 0.0 });
    }
    let shoot = |a: f64| -> Result<(f64, Trace)> {
        let v = metric.unit_vector(x, a);
        let tr = tracer.trace(GeoState::new(x, v), None)?;
        let end = tr.forward_ideal().expect("unbounded trace escapes");
        Ok((wrap_angle(end.theta() - xi.theta()), tr))
    };
    let mut a = u0.arg();
    let (mut r, mut tr) = shoot(a)?;
    for _ in 0..60 {
        if r.abs() < RAY_TOL {
            break;
        }
        let (rh, _) = shoot(a + FD_ANGLE)?;
        let d = wrap_angle(rh - r) / FD_ANGLE;
        let mut step = if d.is_finite() && d > 1e-6 { -r / d } else { -r };
        step = step.clamp(-0.5, 0.5);
        let mut moved = false;
        for _ in 0..20 {
            let (rn, trn) = shoot(a + step)?;
            if rn.abs() < r.abs() {
                a += step;
                r = rn;
                tr = trn;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    if r.abs() > 1e-8 {
        return Err(GeomError::SolverFailure(format!("ray shooting toward {:.6} missed by {r:.3e}", xi.theta())));
    }
    Ok(Ray { start: x, target: xi, angle: a, trace: tr, miss: r })
}

/// Complete geodesic from the ideal point `eta` to `xi`.
#[derive(Clone, Debug)]
pub struct IdealGeodesic {
    pub forward: IdealPoint,
    pub backward: IdealPoint,
    /// Incoming `g₀`-geodesic; arclength 0 is its entry into the escape disk
    /// (or its closest point to the origin when it never enters).
    pub incoming: HypState,
    /// Trace from the entry point through the escape disk.
    pub trace: Option<Trace>,
}

impl IdealGeodesic {
    pub fn is_closed_form(&self) -> bool {
        self.trace.is_none()
    }

    /// Arclength interval spent inside the escape disk.
    pub fn interior(&self) -> (f64, f64) {
        match &self.trace {
            Some(tr) => (0.0, tr.length),
            None => (0.0, 0.0),
        }
    }

    /// Outgoing `g₀`-geodesic with the arclength of its base state.
    pub fn outgoing(&self) -> (f64, HypState) {
        match &self.trace {
            Some(tr) => tr.outgoing(),
            None => (0.0, self.incoming),
        }
    }

    /// Point at arclength `s` outside the interior interval, in closed form.
    pub fn far_point(&self, s: f64) -> Option<Point<f64>> {
        let (a, b) = self.interior();
        if s <= a {
            return Some(crate::hyperbolic::to_point(self.incoming.flow(s - a).z));
        }
        let (s0, h) = self.outgoing();
        (s >= b).then(|| crate::hyperbolic::to_point(h.flow(s - s0).z))
    }

    /// Point at arclength `s`, re-tracing through the interior if needed.
    pub fn point_at(&self, metric: &MetricField, s: f64) -> Result<Point<f64>> {
        if let Some(p) = self.far_point(s) {
            return Ok(p);
        }
        let tr = self.trace.as_ref().expect("interior points exist only for traced geodesics");
        Ok(Tracer::new(metric).trace(tr.start, Some(s))?.end.x)
    }

    /// Arclength of the middle of the interior segment.
    pub fn midpoint(&self) -> f64 {
        let (a, b) = self.interior();
        0.5 * (a + b)
    }

    /// Sampled path extending `tail` beyond the interior on both sides.
    pub fn to_path(&self, metric: &MetricField, tail: f64) -> Result<GeodesicPath> {
        let mut path = GeodesicPath::empty();
        path.push_closed(metric, &self.incoming, 0.0, -tail, 0.0, CLOSED_SAMPLES);
        let (s_out, h) = self.outgoing();
        if let Some(tr) = &self.trace {
            let tracer = Tracer::new(metric).recording();
            let rec = tracer.trace(tr.start, None)?;
            for st in &rec.steps {
                let y = st.y1;
                path.push_state(metric, st.s1, GeoState::new(Point::new(y[0], y[1]), [y[2], y[3]]));
            }
        }
        path.push_closed(metric, &h, s_out, s_out, s_out + tail, CLOSED_SAMPLES);
        path.backward_exit = Some((0.0, GeoState::from_hyp(&self.incoming)));
        path.forward_exit = Some((s_out, GeoState::from_hyp(&h)));
        path.forward_ideal = Some(self.forward);
        path.backward_ideal = Some(self.backward);
        Ok(path)
    }
}

/// Incoming line from `eta` toward `zeta`, traced through the escape disk.
fn ideal_shot(tracer: &Tracer, eta: IdealPoint, zeta: IdealPoint) -> Result<(HypState, Option<Trace>, IdealPoint)> {
    let line = line_between_ideals(zeta, eta)?;
    let re = tracer.escape_radius;
    match line.circle_crossings(re) {
        Some((s_in, _)) if re > 0.0 => {
            let entry = line.flow(s_in);
            let tr = tracer.trace(GeoState::from_hyp(&entry), None)?;
            let fwd = tr.forward_ideal().expect("unbounded trace escapes");
            Ok((entry, Some(tr), fwd))
        }
        _ => Ok((line, None, zeta)),
    }
}

/// Complete geodesic from `eta` to `xi`.
///
/// Geodesics asymptotic to `eta` are parametrized by the far endpoint `ζ` of
/// their incoming `g₀`-line; the forward endpoint is monotone in `ζ` and is
/// matched to `xi` by safeguarded Newton iteration.
pub fn geodesic_between_ideals(metric: &MetricField, xi: IdealPoint, eta: IdealPoint) -> Result<IdealGeodesic> {
    let gap = eta.offset_to(&xi).abs();
    if gap < 1e-12 {
        return Err(GeomError::DegeneratePair(xi.theta()));
    }
    let line = line_between_ideals(xi, eta)?;
    let support = metric.support_radius();
    let (cosh_a, _) = line.closest_approach();
    if metric.is_base() || cosh_a.acosh() >= hyp_radius(support) {
        return Ok(IdealGeodesic { forward: xi, backward: eta, incoming: line, trace: None });
    }
    let tracer = Tracer::new(metric);
    let two_pi = 2.0 * std::f64::consts::PI;
    let lift = |t: IdealPoint| eta.theta() + crate::hyperbolic::canonical_angle(t.theta() - eta.theta());
    let target = lift(xi);
    let f = |z: f64| -> Result<(f64, HypState, Option<Trace>)> {
        let (h, tr, fwd) = ideal_shot(&tracer, eta, IdealPoint::new(z))?;
        Ok((lift(fwd) - target, h, tr))
    };
    let (mut lo, mut hi) = (eta.theta() + 1e-9, eta.theta() + two_pi - 1e-9);
    let mut z = target;
    let (mut r, mut h, mut tr) = f(z)?;
    for _ in 0..100 {
        if r.abs() < 1e-12 {
            break;
        }
        if r < 0.0 {
            lo = lo.max(z);
        } else {
            hi = hi.min(z);
        }
        let dz = 1e-7 * if z + 1e-7 < hi { 1.0 } else { -1.0 };
        let (rh, _, _) = f(z + dz)?;
        let d = (rh - r) / dz;
        let mut zn = if d.is_finite() && d > 0.0 { z - r / d } else { 0.5 * (lo + hi) };
        if zn <= lo || zn >= hi {
            zn = 0.5 * (lo + hi);
        }
        z = zn;
        (r, h, tr) = f(z)?;
        if hi - lo < 1e-15 {
            break;
        }
    }
    let fwd = tr.as_ref().and_then(|t| t.forward_ideal()).unwrap_or(IdealPoint::new(z));
    let bwd = h.backward_ideal();
    let miss_f = xi.offset_to(&fwd).abs();
    let miss_b = eta.offset_to(&bwd).abs();
    if miss_f > 1e-6 || miss_b > 1e-6 {
        return Err(GeomError::EndpointMismatch {
            forward: xi.theta(),
            backward: eta.theta(),
            got_forward: fwd.theta(),
            got_backward: bwd.theta(),
        });
    }
    Ok(IdealGeodesic { forward: xi, backward: eta, incoming: h, trace: tr })
}
