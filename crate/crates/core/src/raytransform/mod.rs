//! Geodesic ray transform of symmetric 2-tensors, on complete geodesics and
//! on chords of a convex disk, plus the linear solenoidal decomposition.

mod decompose;

use std::fmt::Write as _;

use rayon::prelude::*;

pub use decompose::{
    adjointness_defect, calibration_form, decompose_with, grid_floor, solenoidal_decompose, DecomposeOptions, Decomposition, PolarGrid,
};

use crate::chart::Point;
use crate::error::{GeomError, Result};
use crate::fields::{OneFormField, SymTensorField};
use crate::geodesic::{geodesic_between_ideals, GeoState, Tracer};
use crate::hyperbolic::IdealPoint;
use crate::metric::{christoffel_from, MetricField};
use crate::ode::{integrate, Control, Step, Tolerance};

/// Kernel property threshold for `|I(d v)|`.
pub const KERNEL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RaySpec {
    BoundaryPair { xi: IdealPoint, eta: IdealPoint },
    Chord { x: Point<f64>, direction: [f64; 2] },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayTransformValue {
    pub value: f64,
    pub ray: RaySpec,
    /// Difference between the integrator's running quadrature and composite
    /// Simpson on its dense output.
    pub error: f64,
}

/// Composite Simpson over accepted steps, reading the integrand from the
/// derivative of the quadrature component.
fn simpson(steps: &[Step<5>], f: &SymTensorField, upto: Option<f64>) -> f64 {
    let mut total = 0.0;
    for st in steps {
        let s1 = upto.map_or(st.s1, |u| st.s1.min(u));
        if s1 <= st.s0 {
            break;
        }
        let mid = st.interpolate(0.5 * (st.s0 + s1));
        let q = |y: &[f64; 5]| f.value(Point::new(y[0], y[1])).quad([y[2], y[3]]);
        let end = if s1 < st.s1 { q(&st.interpolate(s1)) } else { st.f1[4] };
        total += (s1 - st.s0) / 6.0 * (st.f0[4] + 4.0 * q(&mid) + end);
    }
    total
}

/// `I_g f (ξ, η)`: the integral of `f(γ̇, γ̇)` along the complete geodesic from
/// `eta` to `xi`.
pub fn ray_transform(metric: &MetricField, f: &SymTensorField, xi: IdealPoint, eta: IdealPoint) -> Result<RayTransformValue> {
    let ray = RaySpec::BoundaryPair { xi, eta };
    if xi.offset_to(&eta).abs() < 1e-12 {
        return Err(GeomError::DegeneratePair(xi.theta()));
    }
    if f.is_zero() {
        return Ok(RayTransformValue { value: 0.0, ray, error: 0.0 });
    }
    let geo = geodesic_between_ideals(metric, xi, eta)?;
    let tracer = Tracer::new(metric).with_integrand(f).recording();
    let Some((s_in, _)) = geo.incoming.circle_crossings(tracer.escape_radius) else {
        return Ok(RayTransformValue { value: 0.0, ray, error: 0.0 });
    };
    let start = GeoState::from_hyp(&geo.incoming.flow(s_in.min(0.0)));
    let tr = tracer.trace(start, None)?;
    let error = (simpson(&tr.steps, f, None) - tr.integral).abs();
    Ok(RayTransformValue { value: tr.integral, ray, error })
}

/// Closed disk `|x| ≤ radius` with a metric whose perturbation it contains,
/// the setting of the chord transform.
#[derive(Clone, Debug)]
pub struct CdrmDisk {
    pub radius: f64,
    pub metric: MetricField,
}

/// One chord through the disk.
#[derive(Clone, Debug)]
pub struct Chord {
    /// Exit point and outward unit velocity there.
    pub exit: GeoState,
    /// Entry point (at arclength `τ₋ = −length`) with its velocity.
    pub entry: GeoState,
    pub length: f64,
    pub integral: f64,
    pub error: f64,
}

impl CdrmDisk {
    /// Checks that the boundary is strictly convex at 64 sample points.
    pub fn new(metric: MetricField, radius: f64) -> Result<Self> {
        if !(radius > metric.support_radius() && radius < 1.0) {
            return Err(GeomError::InvalidInput(format!("disk radius {radius} must lie in ({}, 1)", metric.support_radius())));
        }
        let disk = CdrmDisk { radius, metric };
        let worst = (0..64).map(|k| disk.geodesic_curvature(k as f64 * std::f64::consts::TAU / 64.0)).fold(f64::INFINITY, f64::min);
        if worst <= 0.0 {
            return Err(GeomError::InvalidInput(format!("boundary not strictly convex: geodesic curvature {worst}")));
        }
        Ok(disk)
    }

    /// Outward unit normal (in the metric) at the boundary point of angle `theta`.
    pub fn normal(&self, theta: f64) -> [f64; 2] {
        let p = Point::polar(self.radius, theta);
        let gi = self.metric.value(p).inverse();
        let n = gi.apply([theta.cos(), theta.sin()]);
        let len = self.metric.value(p).quad(n).sqrt();
        [n[0] / len, n[1] / len]
    }

    /// Geodesic curvature of the boundary circle with respect to the inward normal.
    pub fn geodesic_curvature(&self, theta: f64) -> f64 {
        let p = Point::polar(self.radius, theta);
        let j = self.metric.jet1(p);
        let gam = christoffel_from(&j);
        let (c, s) = (theta.cos(), theta.sin());
        let t = [-self.radius * s, self.radius * c];
        let tt = [-self.radius * c, -self.radius * s];
        let mut acc = tt;
        for (k, a) in acc.iter_mut().enumerate() {
            for i in 0..2 {
                for l in 0..2 {
                    *a += gam[k][i][l] * t[i] * t[l];
                }
            }
        }
        let n = self.normal(theta);
        let speed2 = j.value.quad(t);
        -j.value.bilinear(acc, n) / speed2
    }

    /// Chord ending at boundary point `x` with outward unit direction `dir`.
    pub fn chord(&self, f: &SymTensorField, x: Point<f64>, dir: [f64; 2]) -> Result<Chord> {
        if (x.norm() - self.radius).abs() > 1e-9 {
            return Err(GeomError::InvalidInput(format!("entry point at radius {} is not on the boundary", x.norm())));
        }
        let theta = x.y.atan2(x.x);
        let g = self.metric.value(x);
        let outward = g.bilinear(dir, self.normal(theta));
        if outward < -1e-12 {
            return Err(GeomError::NotEntrySphere { normal: outward });
        }
        if (g.quad(dir) - 1.0).abs() > 1e-8 {
            return Err(GeomError::InvalidInput("chord direction is not a unit vector".into()));
        }
        let r2 = self.radius * self.radius;
        let mut steps: Vec<Step<5>> = Vec::new();
        let out = integrate(
            |_, y: &[f64; 5]| {
                let p = Point::new(y[0], y[1]);
                if p.norm_sq() >= 1.0 {
                    return Err(GeomError::PointOutsideChart { x: p.x, y: p.y });
                }
                let v = [y[2], y[3]];
                let (a, _) = self.metric.acceleration(p, v);
                Ok([v[0], v[1], a[0], a[1], f.value(p).quad(v)])
            },
            0.0,
            [x.x, x.y, -dir[0], -dir[1], 0.0],
            200.0,
            &Tolerance::default(),
            |st| {
                steps.push(*st);
                let y = st.y1;
                if y[0] * y[0] + y[1] * y[1] >= r2 && y[0] * y[2] + y[1] * y[3] > 0.0 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        )?;
        if !out.stopped {
            return Err(GeomError::Integrator("chord did not leave the disk".into()));
        }
        let last = *steps.last().expect("at least one step");
        let r_at = |s: f64| {
            let y = last.interpolate(s);
            y[0] * y[0] + y[1] * y[1] - r2
        };
        let (mut lo, mut hi) = (last.s0, last.s1);
        if r_at(lo) >= 0.0 {
            // tangential start: the chord is the single boundary point
            lo = last.s0;
            hi = last.s0;
        }
        for _ in 0..80 {
            if hi - lo <= 1e-15 {
                break;
            }
            let m = 0.5 * (lo + hi);
            if r_at(m) < 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        let y = if hi > last.s0 { last.interpolate(hi) } else { last.y0 };
        let length = hi;
        let integral = y[4];
        let error = (simpson(&steps, f, Some(length)) - integral).abs();
        Ok(Chord { exit: GeoState::new(x, dir), entry: GeoState::new(Point::new(y[0], y[1]), [-y[2], -y[3]]), length, integral, error })
    }

    /// Ideal endpoints `(forward, backward)` of the complete geodesic
    /// extending a chord.
    pub fn extension(&self, chord: &Chord) -> Result<(IdealPoint, IdealPoint)> {
        let tracer = Tracer::new(&self.metric);
        let fwd = tracer.trace(chord.exit, None)?.forward_ideal();
        let bwd = tracer.trace(chord.entry.reversed(), None)?.forward_ideal();
        match (fwd, bwd) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(GeomError::NotEscaped { radius: self.radius, radial: 0.0 }),
        }
    }

    /// Boundary point and unit outward direction for a boundary angle and a
    /// direction angle measured from the outward normal.
    pub fn entry_state(&self, theta: f64, angle: f64) -> (Point<f64>, [f64; 2]) {
        let x = Point::polar(self.radius, theta);
        let v = self.metric.unit_vector(x, theta + angle);
        (x, v)
    }
}

/// `I_M f` on one chord.
pub fn cdrm_ray_transform(disk: &CdrmDisk, f: &SymTensorField, x: Point<f64>, dir: [f64; 2]) -> Result<RayTransformValue> {
    let c = disk.chord(f, x, dir)?;
    Ok(RayTransformValue { value: c.integral, ray: RaySpec::Chord { x, direction: dir }, error: c.error })
}

#[derive(Clone, Debug)]
pub struct KernelReport {
    pub rays: Vec<(IdealPoint, IdealPoint)>,
    pub values: Vec<f64>,
    pub max_abs: f64,
    pub pass: bool,
}

impl KernelReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("xi,eta,ray_transform\n");
        for ((a, b), v) in self.rays.iter().zip(&self.values) {
            let _ = writeln!(out, "{:.10},{:.10},{:.6e}", a.theta(), b.theta(), v);
        }
        out
    }
}

/// `max |I(d v)|` over the given complete geodesics.
pub fn potential_kernel_check(metric: &MetricField, v: &OneFormField, rays: &[(IdealPoint, IdealPoint)]) -> Result<KernelReport> {
    let f = crate::operators::sym_derivative(metric, v);
    let values = rays.par_iter().map(|&(xi, eta)| Ok(ray_transform(metric, &f, xi, eta)?.value)).collect::<Result<Vec<_>>>()?;
    let max_abs = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(KernelReport { rays: rays.to_vec(), values, max_abs, pass: max_abs <= KERNEL_TOL })
}

/// Verdict of the kernel probe on one tensor field.
#[derive(Clone, Debug)]
pub struct KernelProbe {
    pub max_ray: f64,
    /// Relative solenoidal part `‖s‖ / ‖f‖`.
    pub solenoidal: f64,
    pub floor: f64,
    pub ray_at_floor: bool,
    pub solenoidal_at_floor: bool,
    /// A vanishing ray transform with a visible solenoidal part contradicts
    /// the kernel theorem.
    pub consistent: bool,
}

/// Compares chord transforms with the solenoidal part of `f`.
pub fn kernel_inverse_probe(
    disk: &CdrmDisk,
    f: &SymTensorField,
    entries: &[(f64, f64)],
    opts: &DecomposeOptions,
    floor: f64,
) -> Result<KernelProbe> {
    let max_ray = entries
        .par_iter()
        .map(|&(th, a)| {
            let (x, v) = disk.entry_state(th, a);
            Ok(cdrm_ray_transform(disk, f, x, v)?.value.abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let dec = solenoidal_decompose(disk, f, opts)?;
    let solenoidal = dec.relative_solenoidal();
    let ray_at_floor = max_ray <= KERNEL_TOL;
    let solenoidal_at_floor = solenoidal <= 10.0 * floor;
    Ok(KernelProbe { max_ray, solenoidal, floor, ray_at_floor, solenoidal_at_floor, consistent: !ray_at_floor || solenoidal_at_floor })
}
