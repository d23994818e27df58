//! Quantities at infinity: Gromov products, visual metrics, Busemann
//! functions, cross-ratios and conformal derivatives of the boundary identity.
//!
//! Both boundaries are coordinatized by the chart angle; the boundary map
//! between `g₀` and a compactly supported perturbation is the identity in that
//! coordinate.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::chart::Point;
use crate::error::{GeomError, Result};
use crate::geodesic::{distance, ray_from, Ray};
use crate::hyperbolic::{gromov_closed, hyp_distance, to_complex, IdealPoint};
use crate::metric::MetricField;
use crate::sampling::Quadruple;

/// Truncation ladder for Gromov products and Busemann functions.
pub const LADDER: [f64; 4] = [6.0, 9.0, 12.0, 15.0];
/// Increment below which a ladder counts as converged.
pub const LADDER_TOL: f64 = 1e-6;
/// Angular offsets for conformal derivatives.
pub const OFFSETS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
/// Relative agreement of the two Richardson values.
pub const DERIVATIVE_TOL: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasurementKind {
    GromovProduct,
    VisualDistance,
    Busemann,
    CrossRatio,
    ConformalDerivative,
}

impl MeasurementKind {
    pub fn name(&self) -> &'static str {
        match self {
            MeasurementKind::GromovProduct => "gromov_product",
            MeasurementKind::VisualDistance => "visual_distance",
            MeasurementKind::Busemann => "busemann",
            MeasurementKind::CrossRatio => "cross_ratio",
            MeasurementKind::ConformalDerivative => "conformal_derivative",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundaryMeasurement {
    pub kind: MeasurementKind,
    pub value: f64,
    /// Last truncation used (arclength `T`, or angular offset for derivatives).
    pub truncation: f64,
    pub history: Vec<(f64, f64)>,
    pub converged: bool,
}

/// Runs `eval` over the shifted ladder until two successive values agree.
fn run_ladder(kind: MeasurementKind, shift: f64, mut eval: impl FnMut(f64) -> Result<f64>) -> Result<BoundaryMeasurement> {
    let mut history: Vec<(f64, f64)> = Vec::with_capacity(LADDER.len());
    for t in LADDER.iter().map(|t| t + shift) {
        let v = eval(t)?;
        if let Some(&(_, prev)) = history.last() {
            if (v - prev).abs() < LADDER_TOL {
                history.push((t, v));
                return Ok(BoundaryMeasurement { kind, value: v, truncation: t, history, converged: true });
            }
        }
        history.push((t, v));
    }
    Err(GeomError::NotConverged { kind: kind.name(), history })
}

fn distinct(a: IdealPoint, b: IdealPoint) -> Result<()> {
    if a.offset_to(&b).abs() < 1e-12 {
        return Err(GeomError::DegeneratePair(a.theta()));
    }
    Ok(())
}

/// Gromov product from two precomputed rays sharing their basepoint.
pub fn gromov_from_rays(metric: &MetricField, a: &Ray, b: &Ray) -> Result<BoundaryMeasurement> {
    distinct(a.target, b.target)?;
    let x = to_complex(a.start);
    let shift = gromov_closed(x, a.target, b.target).max(0.0);
    run_ladder(MeasurementKind::GromovProduct, shift, |t| {
        let p = a.point_at(metric, t)?;
        let q = b.point_at(metric, t)?;
        Ok(t - 0.5 * distance(metric, p, q)?)
    })
}

/// `(ξ|η)_x`, the limit of `T − ½ d(a_T, b_T)` along the rays from `x`.
pub fn gromov_product(metric: &MetricField, x: Point<f64>, xi: IdealPoint, eta: IdealPoint) -> Result<BoundaryMeasurement> {
    distinct(xi, eta)?;
    let a = ray_from(metric, x, xi)?;
    let b = ray_from(metric, x, eta)?;
    gromov_from_rays(metric, &a, &b)
}

/// `ρ_x(ξ, η) = exp(−(ξ|η)_x)`.
pub fn visual_distance(metric: &MetricField, x: Point<f64>, xi: IdealPoint, eta: IdealPoint) -> Result<BoundaryMeasurement> {
    let g = gromov_product(metric, x, xi, eta)?;
    Ok(to_visual(g))
}

fn to_visual(g: BoundaryMeasurement) -> BoundaryMeasurement {
    BoundaryMeasurement {
        kind: MeasurementKind::VisualDistance,
        value: (-g.value).exp(),
        truncation: g.truncation,
        history: g.history.into_iter().map(|(t, v)| (t, (-v).exp())).collect(),
        converged: g.converged,
    }
}

/// `B(ξ, x, y) = lim d(x, a_T) − d(y, a_T)` with `a_T` on the ray from `x`.
pub fn busemann(metric: &MetricField, xi: IdealPoint, x: Point<f64>, y: Point<f64>) -> Result<BoundaryMeasurement> {
    if x == y {
        return Ok(BoundaryMeasurement {
            kind: MeasurementKind::Busemann,
            value: 0.0,
            truncation: 0.0,
            history: Vec::new(),
            converged: true,
        });
    }
    let ray = ray_from(metric, x, xi)?;
    let shift = hyp_distance(x, y);
    run_ladder(MeasurementKind::Busemann, shift, |t| {
        let a = ray.point_at(metric, t)?;
        Ok(t - distance(metric, y, a)?)
    })
}

/// `[ξ ξ′ η η′] = ρ(ξ,η) ρ(ξ′,η′) / (ρ(ξ,η′) ρ(ξ′,η))` for the visual metric at `x`.
pub fn cross_ratio(metric: &MetricField, x: Point<f64>, q: &Quadruple) -> Result<BoundaryMeasurement> {
    let pts = [q.xi, q.xi2, q.eta, q.eta2];
    for i in 0..4 {
        for j in i + 1..4 {
            distinct(pts[i], pts[j])?;
        }
    }
    let rays = pts.iter().map(|&p| ray_from(metric, x, p)).collect::<Result<Vec<_>>>()?;
    let g = |i: usize, j: usize| gromov_from_rays(metric, &rays[i], &rays[j]);
    let (a, b, c, d) = (g(0, 2)?, g(1, 3)?, g(0, 3)?, g(1, 2)?);
    let log = -a.value - b.value + c.value + d.value;
    let truncation = [&a, &b, &c, &d].iter().map(|m| m.truncation).fold(0.0, f64::max);
    Ok(BoundaryMeasurement {
        kind: MeasurementKind::CrossRatio,
        value: log.exp(),
        truncation,
        history: vec![(truncation, log.exp())],
        converged: true,
    })
}

/// Derivative at `ξ` of the boundary identity from `ρ_{x,g₀}` to `ρ_{y,g}`.
///
/// The ratio of visual distances at `ξ ± δ` is averaged geometrically, which
/// cancels the odd part of the error, and one Richardson step removes the
/// remaining `δ²` term.
pub fn conformal_derivative(
    g0: &MetricField,
    g: &MetricField,
    xi: IdealPoint,
    x: Point<f64>,
    y: Point<f64>,
) -> Result<BoundaryMeasurement> {
    let ray_x = ray_from(g0, x, xi)?;
    let ray_y = ray_from(g, y, xi)?;
    let ratio = |delta: f64| -> Result<f64> {
        let mut log = 0.0;
        for s in [delta, -delta] {
            let eta = xi.rotated(s);
            let gy = gromov_from_rays(g, &ray_y, &ray_from(g, y, eta)?)?.value;
            let gx = gromov_from_rays(g0, &ray_x, &ray_from(g0, x, eta)?)?.value;
            log += gx - gy;
        }
        Ok((0.5 * log).exp())
    };
    let m = OFFSETS.iter().map(|&d| ratio(d)).collect::<Result<Vec<_>>>()?;
    let history: Vec<(f64, f64)> = OFFSETS.iter().copied().zip(m.iter().copied()).collect();
    let r1 = (4.0 * m[1] - m[0]) / 3.0;
    let r2 = (4.0 * m[2] - m[1]) / 3.0;
    if (r2 - r1).abs() > DERIVATIVE_TOL * r2.abs().max(1.0) {
        return Err(GeomError::NotConverged { kind: MeasurementKind::ConformalDerivative.name(), history });
    }
    Ok(BoundaryMeasurement { kind: MeasurementKind::ConformalDerivative, value: r2, truncation: OFFSETS[2], history, converged: true })
}

#[derive(Clone, Debug)]
pub struct MoebiusRow {
    pub quadruple: Quadruple,
    pub cross_ratio: f64,
    pub base_cross_ratio: f64,
    /// `|log([·]_g / [·]_{g₀})|`.
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub struct MoebiusReport {
    pub rows: Vec<MoebiusRow>,
    pub max_deviation: f64,
}

impl MoebiusReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("xi,xi2,eta,eta2,cross_ratio_g,cross_ratio_g0,log_deviation\n");
        for r in &self.rows {
            let a = r.quadruple.angles();
            let _ = writeln!(
                out,
                "{:.10},{:.10},{:.10},{:.10},{:.12e},{:.12e},{:.6e}",
                a[0], a[1], a[2], a[3], r.cross_ratio, r.base_cross_ratio, r.deviation
            );
        }
        out
    }
}

/// Cross-ratio distortion of the boundary identity over the given quadruples,
/// with visual metrics based at `x`.
pub fn moebius_deviation(g0: &MetricField, g: &MetricField, x: Point<f64>, quads: &[Quadruple]) -> Result<MoebiusReport> {
    let rows = quads
        .par_iter()
        .map(|q| {
            let c = cross_ratio(g, x, q)?.value;
            let c0 = cross_ratio(g0, x, q)?.value;
            Ok(MoebiusRow { quadruple: *q, cross_ratio: c, base_cross_ratio: c0, deviation: (c / c0).ln().abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    Ok(MoebiusReport { rows, max_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Bump, ConformalBump, SymTensorField};
    use crate::hyperbolic::{busemann_closed, visual_closed};

    fn conformal(eps: f64) -> MetricField {
        MetricField::perturbed(SymTensorField::analytic(ConformalBump { eps, bump: Bump::centered(0.5) })).unwrap()
    }

    #[test]
    fn base_gromov_at_center() {
        let g = MetricField::base();
        for gap in [0.3, 1.0, 2.0, std::f64::consts::PI] {
            let m = gromov_product(&g, Point::origin(), IdealPoint::new(0.4), IdealPoint::new(0.4 + gap)).unwrap();
            let want = -(0.5 * gap).sin().ln();
            assert!((m.value - want).abs() < 1e-6, "gap {gap}: {} vs {want}", m.value);
            assert!(m.converged);
        }
    }

    #[test]
    fn base_busemann_matches_closed_form() {
        let g = MetricField::base();
        let xi = IdealPoint::new(1.0);
        let (x, y) = (Point::new(0.2, -0.3), Point::new(-0.5, 0.1));
        let b = busemann(&g, xi, x, y).unwrap();
        let want = busemann_closed(xi, to_complex(x), to_complex(y));
        assert!((b.value - want).abs() < 1e-6, "{} vs {want}", b.value);
    }

    #[test]
    fn base_conformal_derivative_is_exp_busemann() {
        let g = MetricField::base();
        let xi = IdealPoint::new(2.0);
        let (x, y) = (Point::new(0.1, 0.2), Point::new(-0.3, 0.4));
        let d = conformal_derivative(&g, &g, xi, x, y).unwrap();
        let want = busemann_closed(xi, to_complex(x), to_complex(y)).exp();
        assert!((d.value / want - 1.0).abs() < 1e-5, "{} vs {want}", d.value);
    }

    #[test]
    fn perturbed_gromov_is_symmetric_and_in_range() {
        let g = conformal(0.05);
        let (xi, eta) = (IdealPoint::new(0.2), IdealPoint::new(3.0));
        let a = visual_distance(&g, Point::new(0.1, 0.0), xi, eta).unwrap();
        let b = visual_distance(&g, Point::new(0.1, 0.0), eta, xi).unwrap();
        assert!((a.value - b.value).abs() < 1e-9);
        assert!(a.value > 0.0 && a.value <= 1.0);
        // differs from the base value: the geodesic crosses the bump
        let c = visual_closed(to_complex(Point::new(0.1, 0.0)), xi, eta);
        assert!((a.value - c).abs() > 1e-4);
    }
}
