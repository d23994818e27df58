//! Integrated Schwarzian of a compactly supported deformation, by the
//! renormalized distance limit and by conformal derivatives of the boundary
//! identity, with the distance-gap bound and the ray-transform inequality.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::boundary::conformal_derivative;
use crate::chart::Point;
use crate::error::{GeomError, Result};
use crate::geodesic::{distance, geodesic_between_ideals};
use crate::hyperbolic::{hyp_distance, hyp_radius, line_between_ideals, to_point, HypState, IdealPoint};
use crate::metric::MetricField;
use crate::raytransform::ray_transform;

/// Anchor parameters `±R` along the `g₀`-line.
pub const R_LADDER: [f64; 5] = [4.0, 6.0, 8.0, 10.0, 12.0];
/// Last-increment tolerance for the limit.
pub const LIMIT_TOL: f64 = 1e-6;
/// Allowed change under a basepoint shift for the derivative route.
pub const BASEPOINT_TOL: f64 = 2e-4;
/// Basepoint shift along the geodesics.
pub const BASEPOINT_SHIFT: f64 = 0.5;
/// Tolerance of the ray-transform inequality.
pub const SLACK_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchwarzianMethod {
    RenormalizedLimit,
    ConformalDerivative,
}

#[derive(Clone, Debug)]
pub struct SchwarzianValue {
    pub xi: IdealPoint,
    pub eta: IdealPoint,
    pub value: f64,
    pub method: SchwarzianMethod,
    /// `(R, gap)` for the limit, `(basepoint shift, value)` for derivatives.
    pub history: Vec<(f64, f64)>,
    pub converged: bool,
}

fn check_pair(xi: IdealPoint, eta: IdealPoint) -> Result<()> {
    if xi.offset_to(&eta).abs() < 1e-12 {
        return Err(GeomError::DegeneratePair(xi.theta()));
    }
    Ok(())
}

fn anchor_line(xi: IdealPoint, eta: IdealPoint) -> Result<HypState> {
    // closest point to the origin at s = 0, pointing toward ξ
    line_between_ideals(xi, eta)
}

fn metric_distance(metric: &MetricField, p: Point<f64>, q: Point<f64>) -> Result<f64> {
    if metric.is_base() {
        Ok(hyp_distance(p, q))
    } else {
        distance(metric, p, q)
    }
}

/// `lim d_g(p_R, q_R) − d_{g₀}(p_R, q_R)` with `p_R, q_R` at `±R` on the
/// `g₀`-geodesic from `eta` to `xi`. The full ladder is always evaluated.
pub fn schwarzian_via_limit(g0: &MetricField, g: &MetricField, xi: IdealPoint, eta: IdealPoint) -> Result<SchwarzianValue> {
    check_pair(xi, eta)?;
    let line = anchor_line(xi, eta)?;
    let history = R_LADDER
        .iter()
        .map(|&r| {
            let p = to_point(line.flow(r).z);
            let q = to_point(line.flow(-r).z);
            Ok((r, metric_distance(g, p, q)? - metric_distance(g0, p, q)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = history.len();
    let converged = (history[n - 1].1 - history[n - 2].1).abs() < LIMIT_TOL;
    if !converged {
        return Err(GeomError::NotConverged { kind: "schwarzian_via_limit", history });
    }
    Ok(SchwarzianValue { xi, eta, value: history[n - 1].1, method: SchwarzianMethod::RenormalizedLimit, history, converged })
}

/// Conformal-derivative route with `x` on the `g₀`-geodesic and `y` on the
/// `g`-geodesic between the same angles; recomputed with both basepoints
/// shifted along their geodesics.
///
/// With `df = ρ_{y,g} / ρ_{x,g₀}` one has `log df(ξ) + log df(η) = d_{g₀} − d_g`
/// in the limit, so the sum is negated to match the renormalized limit.
pub fn schwarzian_via_derivatives(g0: &MetricField, g: &MetricField, xi: IdealPoint, eta: IdealPoint) -> Result<SchwarzianValue> {
    check_pair(xi, eta)?;
    let geo0 = geodesic_between_ideals(g0, xi, eta)?;
    let geo = geodesic_between_ideals(g, xi, eta)?;
    let eval = |shift: f64| -> Result<f64> {
        let x = geo0.point_at(g0, geo0.midpoint() + shift)?;
        let y = geo.point_at(g, geo.midpoint() + shift)?;
        let a = conformal_derivative(g0, g, xi, x, y)?.value;
        let b = conformal_derivative(g0, g, eta, x, y)?.value;
        // `0.0 -` rather than unary minus keeps the base value at +0
        Ok(0.0 - (a.ln() + b.ln()))
    };
    let s0 = eval(0.0)?;
    let s1 = eval(BASEPOINT_SHIFT)?;
    let history = vec![(0.0, s0), (BASEPOINT_SHIFT, s1)];
    if (s0 - s1).abs() >= BASEPOINT_TOL {
        return Err(GeomError::NotConverged { kind: "schwarzian_via_derivatives", history });
    }
    Ok(SchwarzianValue { xi, eta, value: s0, method: SchwarzianMethod::ConformalDerivative, history, converged: true })
}

/// Both Schwarzian routes on one pair.
#[derive(Clone, Debug)]
pub struct SchwarzianRow {
    pub limit: SchwarzianValue,
    pub derivative: SchwarzianValue,
}

impl SchwarzianRow {
    pub fn difference(&self) -> f64 {
        (self.limit.value - self.derivative.value).abs()
    }
}

pub fn schwarzian_scan(g0: &MetricField, g: &MetricField, pairs: &[(IdealPoint, IdealPoint)]) -> Result<Vec<SchwarzianRow>> {
    pairs
        .par_iter()
        .map(|&(xi, eta)| {
            Ok(SchwarzianRow { limit: schwarzian_via_limit(g0, g, xi, eta)?, derivative: schwarzian_via_derivatives(g0, g, xi, eta)? })
        })
        .collect()
}

pub fn schwarzian_csv(rows: &[SchwarzianRow]) -> String {
    let mut out = String::from("xi,eta,s_limit,s_derivative,abs_diff\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.10},{:.10},{:.10e},{:.10e},{:.3e}",
            r.limit.xi.theta(),
            r.limit.eta.theta(),
            r.limit.value,
            r.derivative.value,
            r.difference()
        );
    }
    out
}

#[derive(Clone, Debug)]
pub struct GapRow {
    pub p: Point<f64>,
    pub q: Point<f64>,
    pub gap: f64,
    /// The `g₀`-segment avoids the ball `B`.
    pub avoids_ball: bool,
}

#[derive(Clone, Debug)]
pub struct GapReport {
    pub rows: Vec<GapRow>,
    pub ball_radius: f64,
    pub diam_g: f64,
    pub diam_g0: f64,
    pub bound: f64,
    pub max_gap: f64,
    /// Every pair avoiding `B` has gap exactly zero.
    pub exact_zeros: bool,
    pub pass: bool,
}

impl GapReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("px,py,qx,qy,gap,avoids_ball\n");
        for r in &self.rows {
            let _ = writeln!(out, "{:.10},{:.10},{:.10},{:.10},{:.6e},{}", r.p.x, r.p.y, r.q.x, r.q.y, r.gap, r.avoids_ball);
        }
        out
    }
}

/// `diam_g` of the origin-centred chart disk of radius `radius`, maximized
/// over pairs of boundary points: a coarse sweep followed by coordinate ascent.
pub fn boundary_diameter(g: &MetricField, radius: f64, samples: usize) -> Result<f64> {
    let d = |a: f64, b: f64| -> Result<f64> {
        if (a - b).abs() < 1e-12 {
            return Ok(0.0);
        }
        metric_distance(g, Point::polar(radius, a), Point::polar(radius, b))
    };
    let step = std::f64::consts::TAU / samples as f64;
    let pairs: Vec<(usize, usize)> = (0..samples).flat_map(|i| (i + 1..samples).map(move |j| (i, j))).collect();
    let vals = pairs.par_iter().map(|&(i, j)| Ok((d(i as f64 * step, j as f64 * step)?, i, j))).collect::<Result<Vec<_>>>()?;
    let (mut best, i, j) = vals.into_iter().fold((0.0, 0, 0), |acc, v| if v.0 > acc.0 { v } else { acc });
    let (mut a, mut b) = (i as f64 * step, j as f64 * step);
    let mut h = 0.5 * step;
    while h > 1e-6 {
        let mut moved = false;
        for (da, db) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            let v = d(a + da, b + db)?;
            if v > best {
                best = v;
                a += da;
                b += db;
                moved = true;
                break;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    Ok(best)
}

/// `|d_g − d_{g₀}|` over point pairs against `diam_g(B) + 3 diam_{g₀}(B)`.
pub fn distance_gap_scan(g0: &MetricField, g: &MetricField, pairs: &[(Point<f64>, Point<f64>)], ball_radius: f64) -> Result<GapReport> {
    let rb = hyp_radius(ball_radius);
    let rows = pairs
        .par_iter()
        .map(|&(p, q)| {
            let (zp, zq) = (crate::hyperbolic::to_complex(p), crate::hyperbolic::to_complex(q));
            let seg = HypState::new(zp, crate::hyperbolic::direction_toward(zp, zq));
            let avoids_ball = seg.min_origin_distance(0.0, hyp_distance(p, q)) >= rb;
            let gap = (metric_distance(g, p, q)? - metric_distance(g0, p, q)?).abs();
            Ok(GapRow { p, q, gap, avoids_ball })
        })
        .collect::<Result<Vec<_>>>()?;
    let diam_g = boundary_diameter(g, ball_radius, 32)?;
    let diam_g0 = 2.0 * rb;
    let bound = diam_g + 3.0 * diam_g0;
    let max_gap = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
    let exact_zeros = rows.iter().filter(|r| r.avoids_ball).all(|r| r.gap == 0.0);
    Ok(GapReport { rows, ball_radius, diam_g, diam_g0, bound, max_gap, exact_zeros, pass: exact_zeros && max_gap <= bound })
}

#[derive(Clone, Debug)]
pub struct RayVsSchwarzian {
    pub xi: IdealPoint,
    pub eta: IdealPoint,
    /// `I_{g₀}(g − g₀)(ξ, η)`.
    pub lhs: f64,
    /// `2 S_{g₀}(g)(ξ, η)`.
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

pub fn ray_vs_schwarzian(g0: &MetricField, g: &MetricField, xi: IdealPoint, eta: IdealPoint) -> Result<RayVsSchwarzian> {
    let h = g.perturbation().minus(g0.perturbation());
    let lhs = ray_transform(g0, &h, xi, eta)?.value;
    let rhs = 2.0 * schwarzian_via_limit(g0, g, xi, eta)?.value;
    let slack = lhs - rhs;
    Ok(RayVsSchwarzian { xi, eta, lhs, rhs, slack, pass: slack >= -SLACK_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::MetricFamily;
    use crate::fields::Twist;
    use crate::fields::{Bump, ConformalBump, SymTensorField};

    fn conformal(eps: f64) -> MetricField {
        MetricField::perturbed(SymTensorField::analytic(ConformalBump { eps, bump: Bump::centered(0.5) })).unwrap()
    }

    #[test]
    fn base_metric_has_zero_schwarzian() {
        let g = MetricField::base();
        let s = schwarzian_via_limit(&g, &g, IdealPoint::new(0.0), IdealPoint::new(2.0)).unwrap();
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn two_routes_agree_on_conformal_bump() {
        let g0 = MetricField::base();
        let g = conformal(0.05);
        let (xi, eta) = (IdealPoint::new(0.0), IdealPoint::new(std::f64::consts::PI));
        let a = schwarzian_via_limit(&g0, &g, xi, eta).unwrap();
        let b = schwarzian_via_derivatives(&g0, &g, xi, eta).unwrap();
        println!("limit {:?}\nderiv {:?}", a.history, b.history);
        assert!(a.value > 1e-4);
        assert!((a.value - b.value).abs() < 1e-3, "{} vs {}", a.value, b.value);
        let r = ray_vs_schwarzian(&g0, &g, xi, eta).unwrap();
        assert!(r.slack > 0.0);
    }

    #[test]
    fn pullback_schwarzian_vanishes() {
        let g0 = MetricField::base();
        let fam = MetricFamily::pullback(Twist { alpha: 0.8, r0: 0.5 });
        let g = fam.metric_at(1.0).unwrap();
        let (xi, eta) = (IdealPoint::new(0.3), IdealPoint::new(2.5));
        let a = schwarzian_via_limit(&g0, &g, xi, eta).unwrap();
        assert!(a.value.abs() < 1e-6, "{}", a.value);
        let b = schwarzian_via_derivatives(&g0, &g, xi, eta).unwrap();
        assert!(b.value.abs() < 1e-4, "{}", b.value);
    }
}
