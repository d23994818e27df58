//! Hybrid geodesic tracing: Runge–Kutta inside the escape disk, exact disk-model
//! continuation outside it (where `g = g₀`).

use num_complex::Complex64;

use crate::chart::Point;
use crate::error::{GeomError, Result};
use crate::fields::SymTensorField;
use crate::hyperbolic::{to_complex, to_point, HypState, IdealPoint};
use crate::metric::MetricField;
use crate::ode::{integrate, Control, Step, Tolerance};

/// Margin between the perturbation support and the escape radius.
pub const ESCAPE_MARGIN: f64 = 0.05;

/// Cap on the arclength spent inside the escape disk.
const MAX_INTERIOR_LENGTH: f64 = 200.0;

/// Position and chart velocity of unit `g`-speed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeoState {
    pub x: Point<f64>,
    pub v: [f64; 2],
}

impl GeoState {
    pub fn new(x: Point<f64>, v: [f64; 2]) -> Self {
        GeoState { x, v }
    }

    pub fn from_hyp(h: &HypState) -> Self {
        let v = h.velocity();
        GeoState { x: to_point(h.z), v: [v.re, v.im] }
    }

    /// Valid only where `g = g₀`.
    pub fn to_hyp(&self) -> HypState {
        HypState::new(to_complex(self.x), Complex64::new(self.v[0], self.v[1]))
    }

    pub fn radial_velocity(&self) -> f64 {
        self.x.x * self.v[0] + self.x.y * self.v[1]
    }

    pub fn reversed(&self) -> Self {
        GeoState { x: self.x, v: [-self.v[0], -self.v[1]] }
    }
}

/// Result of tracing one geodesic.
#[derive(Clone, Debug)]
pub struct Trace {
    pub start: GeoState,
    pub end: GeoState,
    /// Arclength reached (`None` requested ⇒ arclength at escape).
    pub length: f64,
    /// Arclength and state where the Runge–Kutta segment began.
    pub entry: Option<(f64, GeoState)>,
    /// Arclength and state where the geodesic left the escape disk for good.
    pub exit: Option<(f64, GeoState)>,
    /// `∫ f(γ̇, γ̇) ds` over the Runge–Kutta segment.
    pub integral: f64,
    /// Accepted Runge–Kutta steps `(x, y, vx, vy, ∫f)`, when recorded.
    pub steps: Vec<Step<5>>,
}

impl Trace {
    /// Outgoing `g₀`-geodesic after the last exit (or from the start if the
    /// geodesic never entered the escape disk).
    pub fn outgoing(&self) -> (f64, HypState) {
        match self.exit {
            Some((s, st)) => (s, st.to_hyp()),
            None if self.entry.is_none() => (0.0, self.start.to_hyp()),
            None => (self.length, self.end.to_hyp()),
        }
    }

    pub fn escaped(&self) -> bool {
        self.exit.is_some() || self.entry.is_none()
    }

    pub fn forward_ideal(&self) -> Option<IdealPoint> {
        if self.escaped() {
            Some(self.outgoing().1.forward_ideal())
        } else {
            None
        }
    }

    /// Position at arclength `s` past the final exit, in closed form.
    pub fn far_point(&self, s: f64) -> Option<GeoState> {
        let (s0, h) = self.outgoing();
        if !self.escaped() || s < s0 {
            return None;
        }
        Some(GeoState::from_hyp(&h.flow(s - s0)))
    }
}

/// Geodesic tracer for a metric, optionally accumulating `∫ f(γ̇, γ̇) ds`.
#[derive(Clone, Debug)]
pub struct Tracer<'a> {
    pub metric: &'a MetricField,
    pub integrand: Option<&'a SymTensorField>,
    pub escape_radius: f64,
    pub tol: Tolerance,
    pub record: bool,
}

impl<'a> Tracer<'a> {
    pub fn new(metric: &'a MetricField) -> Self {
        Tracer { metric, integrand: None, escape_radius: escape_radius(metric, None), tol: Tolerance::default(), record: false }
    }

    pub fn with_integrand(mut self, f: &'a SymTensorField) -> Self {
        self.integrand = Some(f);
        self.escape_radius = escape_radius(self.metric, Some(f));
        self
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn recording(mut self) -> Self {
        self.record = true;
        self
    }

    fn rhs(&self, y: &[f64; 5]) -> Result<[f64; 5]> {
        let p = Point::new(y[0], y[1]);
        if p.norm_sq() >= 1.0 {
            return Err(GeomError::PointOutsideChart { x: p.x, y: p.y });
        }
        let v = [y[2], y[3]];
        let (a, _) = self.metric.acceleration(p, v);
        let q = self.integrand.map_or(0.0, |f| f.value(p).quad(v));
        Ok([v[0], v[1], a[0], a[1], q])
    }

    /// Runge–Kutta from `st` until escape or until arclength `limit`.
    fn interior(&self, st: GeoState, limit: Option<f64>) -> Result<(f64, GeoState, bool, f64, Vec<Step<5>>)> {
        let re2 = self.escape_radius * self.escape_radius;
        let s_end = limit.unwrap_or(MAX_INTERIOR_LENGTH).min(MAX_INTERIOR_LENGTH);
        let y0 = [st.x.x, st.x.y, st.v[0], st.v[1], 0.0];
        let mut steps = Vec::new();
        let record = self.record;
        let out = integrate(
            |_, y| self.rhs(y),
            0.0,
            y0,
            s_end,
            &self.tol,
            |step| {
                if record {
                    steps.push(*step);
                }
                let y = step.y1;
                let r2 = y[0] * y[0] + y[1] * y[1];
                if r2 >= re2 && y[0] * y[2] + y[1] * y[3] > 0.0 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        )?;
        let y = out.y;
        let end = GeoState::new(Point::new(y[0], y[1]), [y[2], y[3]]);
        if !out.stopped && limit.is_none() {
            return Err(GeomError::Integrator(format!("geodesic did not leave the escape disk within length {MAX_INTERIOR_LENGTH}")));
        }
        Ok((out.s, end, out.stopped, y[4], steps))
    }

    /// Traces from `start` for arclength `length`, or until escape when `None`.
    pub fn trace(&self, start: GeoState, length: Option<f64>) -> Result<Trace> {
        let re = self.escape_radius;
        let mut s = 0.0;
        let mut cur = start;
        let mut entry = None;
        if start.x.norm() >= re {
            let h = start.to_hyp();
            let crossing = if re > 0.0 { h.circle_crossings(re) } else { None };
            match crossing {
                Some((s_in, s_out)) if s_out > 1e-12 && length.is_none_or(|l| s_in.max(0.0) < l) => {
                    let s_in = s_in.max(0.0);
                    cur = GeoState::from_hyp(&h.flow(s_in));
                    s = s_in;
                }
                _ => {
                    // never enters: pure closed form
                    let end = match length {
                        Some(l) => GeoState::from_hyp(&h.flow(l)),
                        None => start,
                    };
                    return Ok(Trace {
                        start,
                        end,
                        length: length.unwrap_or(0.0),
                        entry: None,
                        exit: None,
                        integral: 0.0,
                        steps: Vec::new(),
                    });
                }
            }
        }
        entry = entry.or(Some((s, cur)));
        let remaining = length.map(|l| l - s);
        let (ds, end_in, escaped, integral, steps) = self.interior(cur, remaining)?;
        let s_exit = s + ds;
        if !escaped {
            return Ok(Trace { start, end: end_in, length: s_exit, entry, exit: None, integral, steps });
        }
        let exit = Some((s_exit, end_in));
        let (end, total) = match length {
            Some(l) => (GeoState::from_hyp(&end_in.to_hyp().flow(l - s_exit)), l),
            None => (end_in, s_exit),
        };
        Ok(Trace { start, end, length: total, entry, exit, integral, steps })
    }
}

/// Escape radius `max(supports) + margin`, or 0 when nothing is perturbed.
pub fn escape_radius(metric: &MetricField, f: Option<&SymTensorField>) -> f64 {
    let r = metric.support_radius().max(f.map_or(0.0, |f| f.support_radius()));
    if r > 0.0 {
        (r + ESCAPE_MARGIN).min(0.5 * (1.0 + r))
    } else {
        0.0
    }
}
