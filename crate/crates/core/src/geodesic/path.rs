use std::fmt::Write as _;

use crate::chart::Point;
use crate::hyperbolic::{HypState, IdealPoint};
use crate::metric::MetricField;

use super::trace::{GeoState, Trace};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSample {
    pub s: f64,
    pub x: Point<f64>,
    pub v: [f64; 2],
    /// `|g(γ̇, γ̇) − 1|`.
    pub speed_defect: f64,
}

/// Sampled geodesic with its exit data.
///
/// Outside `[backward_exit.s, forward_exit.s]` the curve is a `g₀`-geodesic and
/// `point_at` continues it in closed form.
#[derive(Clone, Debug)]
pub struct GeodesicPath {
    pub samples: Vec<PathSample>,
    pub forward_exit: Option<(f64, GeoState)>,
    pub backward_exit: Option<(f64, GeoState)>,
    pub forward_ideal: Option<IdealPoint>,
    pub backward_ideal: Option<IdealPoint>,
    /// Accumulated `∫ f(γ̇, γ̇) ds` when the tracer carried an integrand.
    pub integral: f64,
}

impl GeodesicPath {
    pub(crate) fn empty() -> Self {
        GeodesicPath {
            samples: Vec::new(),
            forward_exit: None,
            backward_exit: None,
            forward_ideal: None,
            backward_ideal: None,
            integral: 0.0,
        }
    }

    pub fn start(&self) -> &PathSample {
        &self.samples[0]
    }

    pub fn end(&self) -> &PathSample {
        self.samples.last().expect("path has samples")
    }

    /// Arclength between first and last sample.
    pub fn length(&self) -> f64 {
        self.end().s - self.start().s
    }

    pub fn max_speed_defect(&self) -> f64 {
        self.samples.iter().map(|s| s.speed_defect).fold(0.0, f64::max)
    }

    pub(crate) fn push_state(&mut self, metric: &MetricField, s: f64, st: GeoState) {
        let defect = (metric.value(st.x).quad(st.v) - 1.0).abs();
        self.samples.push(PathSample { s, x: st.x, v: st.v, speed_defect: defect });
    }

    /// Samples of a `g₀`-geodesic for `s ∈ [s0, s1]`, relative to the state at
    /// arclength `origin`.
    pub(crate) fn push_closed(&mut self, metric: &MetricField, h: &HypState, origin: f64, s0: f64, s1: f64, n: usize) {
        if s1 <= s0 {
            return;
        }
        for k in 0..=n {
            let s = s0 + (s1 - s0) * k as f64 / n as f64;
            if self.samples.last().is_some_and(|p| s <= p.s) {
                continue;
            }
            self.push_state(metric, s, GeoState::from_hyp(&h.flow(s - origin)));
        }
    }

    /// Appends the recorded part of a trace, shifted by `offset`.
    pub(crate) fn push_trace(&mut self, metric: &MetricField, tr: &Trace, offset: f64, n_closed: usize) {
        let (s_in, _) = tr.entry.unwrap_or((tr.length, tr.end));
        let h0 = tr.start.to_hyp();
        self.push_state(metric, offset, tr.start);
        self.push_closed(metric, &h0, offset, offset, offset + s_in, n_closed);
        for st in &tr.steps {
            let y = st.y1;
            self.push_state(metric, offset + s_in + st.s1, GeoState::new(Point::new(y[0], y[1]), [y[2], y[3]]));
        }
        if let Some((s_out, e)) = tr.exit {
            let h = e.to_hyp();
            self.push_closed(metric, &h, offset + s_out, offset + s_out, offset + tr.length, n_closed);
        }
        self.integral += tr.integral;
    }

    /// Point at arclength `s`: closed form beyond the exits, cubic Hermite
    /// interpolation between samples otherwise.
    pub fn point_at(&self, s: f64) -> Option<GeoState> {
        if let Some((sf, st)) = self.forward_exit {
            if s >= sf {
                return Some(GeoState::from_hyp(&st.to_hyp().flow(s - sf)));
            }
        }
        if let Some((sb, st)) = self.backward_exit {
            if s <= sb {
                return Some(GeoState::from_hyp(&st.to_hyp().flow(s - sb)));
            }
        }
        let k = self.samples.partition_point(|p| p.s <= s);
        if k == 0 || k == self.samples.len() {
            let last = self.samples.last()?;
            return (last.s == s).then_some(GeoState::new(last.x, last.v));
        }
        let (a, b) = (&self.samples[k - 1], &self.samples[k]);
        let h = b.s - a.s;
        let t = (s - a.s) / h;
        let (h00, h10, h01, h11) =
            ((1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t), t * (1.0 - t) * (1.0 - t), t * t * (3.0 - 2.0 * t), t * t * (t - 1.0));
        let x = Point::new(
            h00 * a.x.x + h10 * h * a.v[0] + h01 * b.x.x + h11 * h * b.v[0],
            h00 * a.x.y + h10 * h * a.v[1] + h01 * b.x.y + h11 * h * b.v[1],
        );
        let v = [a.v[0] + t * (b.v[0] - a.v[0]), a.v[1] + t * (b.v[1] - a.v[1])];
        Some(GeoState::new(x, v))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,x,y,vx,vy,speed_defect\n");
        for p in &self.samples {
            let _ = writeln!(out, "{:.12},{:.12},{:.12},{:.12},{:.12},{:.3e}", p.s, p.x.x, p.x.y, p.v[0], p.v[1], p.speed_defect);
        }
        out
    }
}
