//! First-variation identities along metric families, the volume estimate,
//! and the reconstruction of a trivializing isotopy for families whose ray
//! transform vanishes.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::chart::{Point, Sym2};
use crate::error::{GeomError, Result};
use crate::family::{FamilyKind, MetricFamily};
use crate::fields::SymTensorField;
use crate::geodesic::{solve_bvp, GeoState, Tracer};
use crate::hyperbolic::{hyp_distance, IdealPoint};
use crate::metric::MetricField;
use crate::operators::{l2_inner, tensor_norm, volume, volume_change};
use crate::quadrature::integrate_disk;
use crate::raytransform::{decompose_with, grid_floor, ray_transform, CdrmDisk, DecomposeOptions, Decomposition, KERNEL_TOL};
use crate::sampling::ideal_pairs;
use crate::schwarzian::schwarzian_via_limit;

/// Default step of the central differences in `t`.
pub const DEFAULT_DT: f64 = 1e-3;
/// Coarse steps used to estimate the order of the central difference.
pub const ORDER_LADDER: [f64; 3] = [0.2, 0.1, 0.05];
/// Default cap on `‖f‖_{C⁰}` for the volume estimate.
pub const VOLUME_SUP_CAP: f64 = 1e-2;
/// Below this magnitude of the right-hand side errors are reported absolute.
const REL_FLOOR: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct VariationRow {
    /// Free-form label of the configuration (pair of points or angles).
    pub case: String,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

impl VariationRow {
    fn new(case: String, t: f64, lhs: f64, rhs: f64) -> Self {
        let abs_err = (lhs - rhs).abs();
        let rel_err = if rhs.abs() > REL_FLOOR { abs_err / rhs.abs() } else { abs_err };
        VariationRow { case, t, lhs, rhs, abs_err, rel_err }
    }
}

#[derive(Clone, Debug)]
pub struct VariationReport {
    pub dt: f64,
    pub rows: Vec<VariationRow>,
    /// `(Δt, lhs)` on the coarse ladder for one configuration.
    pub order_history: Vec<(f64, f64)>,
    /// Observed order of the central difference; `None` when the
    /// differences are at rounding level or no pair carries a signal.
    pub order: Option<f64>,
}

impl VariationReport {
    pub fn max_rel_err(&self) -> f64 {
        self.rows.iter().map(|r| r.rel_err).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("case,t,lhs,rhs,abs_err,rel_err\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{:.6},{:.12e},{:.12e},{:.3e},{:.3e}", r.case, r.t, r.lhs, r.rhs, r.abs_err, r.rel_err);
        }
        out
    }

    pub fn history_csv(&self) -> String {
        let mut out = String::from("dt,lhs\n");
        for (dt, v) in &self.order_history {
            let _ = writeln!(out, "{dt},{v:.15e}");
        }
        out
    }
}

/// Observed order from three central differences at halving steps.
pub fn observed_order(values: &[f64; 3]) -> Option<f64> {
    let (a, b) = ((values[0] - values[1]).abs(), (values[1] - values[2]).abs());
    if a < 1e-13 || b < 1e-14 {
        None
    } else {
        Some((a / b).log2())
    }
}

fn family_distance(family: &MetricFamily, t: f64, p: Point<f64>, q: Point<f64>) -> Result<f64> {
    let g = family.metric_at(t)?;
    if g.is_base() {
        Ok(hyp_distance(p, q))
    } else {
        Ok(solve_bvp(&g, p, q)?.length)
    }
}

/// `d/dt (d_t² − d₀²)/d₀` by central differences against `∫ ġ_t(γ̇, γ̇)`
/// along the `g_t`-geodesic parametrized on `[0, d₀]`.
pub fn distance_variation_check(family: &MetricFamily, p: Point<f64>, q: Point<f64>, t: f64, dt: f64) -> Result<VariationRow> {
    let d0 = family_distance(family, 0.0, p, q)?;
    let phi = |s: f64| -> Result<f64> {
        let d = family_distance(family, s, p, q)?;
        Ok((d * d - d0 * d0) / d0)
    };
    let lhs = (phi(t + dt)? - phi(t - dt)?) / (2.0 * dt);
    let gdot = family.velocity_at(t);
    let rhs = if gdot.is_zero() {
        0.0
    } else {
        let g = family.metric_at(t)?;
        let sol = solve_bvp(&g, p, q)?;
        let v = g.unit_vector(p, sol.angle);
        let tr = Tracer::new(&g).with_integrand(&gdot).trace(GeoState::new(p, v), Some(sol.length))?;
        // unit speed to speed d_t / d₀
        tr.integral * sol.length / d0
    };
    let case = format!("p=({:.4};{:.4}) q=({:.4};{:.4})", p.x, p.y, q.x, q.y);
    Ok(VariationRow::new(case, t, lhs, rhs))
}

fn two_s(family: &MetricFamily, g0: &MetricField, t: f64, xi: IdealPoint, eta: IdealPoint) -> Result<f64> {
    let g = family.metric_at(t)?;
    Ok(2.0 * schwarzian_via_limit(g0, &g, xi, eta)?.value)
}

fn central(family: &MetricFamily, g0: &MetricField, t: f64, dt: f64, xi: IdealPoint, eta: IdealPoint) -> Result<f64> {
    Ok((two_s(family, g0, t + dt, xi, eta)? - two_s(family, g0, t - dt, xi, eta)?) / (2.0 * dt))
}

/// `d/dt 2S_{g₀}(g_t)(ξ, η)` by central differences against
/// `I_{g_t}(ġ_t)(ξ, η)`, the boundary map being the identity on angles.
pub fn schwarzian_variation_check(
    family: &MetricFamily,
    pairs: &[(IdealPoint, IdealPoint)],
    ts: &[f64],
    dt: f64,
) -> Result<VariationReport> {
    let g0 = family.metric_at(0.0)?;
    let jobs: Vec<(IdealPoint, IdealPoint, f64)> = pairs.iter().flat_map(|&(a, b)| ts.iter().map(move |&t| (a, b, t))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(xi, eta, t)| {
            let lhs = central(family, &g0, t, dt, xi, eta)?;
            let g = family.metric_at(t)?;
            let rhs = ray_transform(&g, &family.velocity_at(t), xi, eta)?.value;
            Ok(VariationRow::new(format!("xi={:.6} eta={:.6}", xi.theta(), eta.theta()), t, lhs, rhs))
        })
        .collect::<Result<Vec<_>>>()?;
    // order measured on the pair with the strongest signal at the middle time
    let mid = ts.len() / 2;
    let strongest = (0..pairs.len())
        .max_by(|&a, &b| rows[a * ts.len() + mid].rhs.abs().total_cmp(&rows[b * ts.len() + mid].rhs.abs()))
        .filter(|&k| rows[k * ts.len() + mid].rhs.abs() > KERNEL_TOL)
        .map(|k| pairs[k]);
    let (order_history, order) = match (strongest, ts.get(mid)) {
        (Some((xi, eta)), Some(&t)) => {
            let hist = ORDER_LADDER.par_iter().map(|&h| Ok((h, central(family, &g0, t, h, xi, eta)?))).collect::<Result<Vec<_>>>()?;
            let order = observed_order(&[hist[0].1, hist[1].1, hist[2].1]);
            (hist, order)
        }
        _ => (Vec::new(), None),
    };
    Ok(VariationReport { dt, rows, order_history, order })
}

#[derive(Clone, Debug, PartialEq)]
pub enum VolumeStatus {
    Holds,
    Violated,
    HypothesisNotMet(String),
}

#[derive(Clone, Debug)]
pub struct VolumeReport {
    pub sup_norm: f64,
    pub volume_base: f64,
    /// `Vol_{g₀+f}(M) − Vol_{g₀}(M)`.
    pub volume_change: f64,
    /// `(g₀, f)_{L²}`.
    pub inner: f64,
    /// `‖f‖²_{L²}`.
    pub norm_sq: f64,
    pub status: VolumeStatus,
}

impl VolumeReport {
    pub fn bound(&self) -> f64 {
        2.0 / 3.0 * self.norm_sq
    }
}

/// Pointwise `g₀`-norm of `f` maximized over a polar sample of the disk.
pub fn sup_norm(g0: &MetricField, f: &SymTensorField, radius: f64) -> f64 {
    let (nr, nt) = (64, 128);
    let mut best = tensor_norm(&g0.value(Point::origin()), &f.value(Point::origin()));
    for a in 1..=nr {
        let r = radius * a as f64 / nr as f64;
        for b in 0..nt {
            let p = Point::polar(r, std::f64::consts::TAU * b as f64 / nt as f64);
            best = best.max(tensor_norm(&g0.value(p), &f.value(p)));
        }
    }
    best
}

/// If `Vol_{g₀+f}(M) ≤ Vol_{g₀}(M)`, checks `(g₀, f)_{L²} ≤ (2/3)‖f‖²_{L²}`.
pub fn volume_inequality_check(disk: &CdrmDisk, f: &SymTensorField, sup_cap: f64) -> VolumeReport {
    let g0 = &disk.metric;
    let radius = disk.radius;
    let sup = sup_norm(g0, f, radius);
    let volume_base = volume(g0, radius).value;
    let change = volume_change(g0, f, radius).value;
    let inner = integrate_disk(radius, f.support_radius().min(radius), |p| {
        let g = g0.value(p);
        Sym2::contract(&g.inverse(), &g, &f.value(p)) * g.det().sqrt()
    })
    .value;
    let norm_sq = l2_inner(g0, f, f, radius).value;
    let status = if sup > sup_cap {
        VolumeStatus::HypothesisNotMet(format!("sup norm {sup:.3e} exceeds cap {sup_cap:.1e}"))
    } else if change > 0.0 {
        VolumeStatus::HypothesisNotMet(format!("volume increases by {change:.3e}"))
    } else if inner <= 2.0 / 3.0 * norm_sq {
        VolumeStatus::Holds
    } else {
        VolumeStatus::Violated
    };
    VolumeReport { sup_norm: sup, volume_base, volume_change: change, inner, norm_sq, status }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub decompose: DecomposeOptions,
    /// Boundary pairs sampled for stage (a).
    pub rays: usize,
    pub seed: u64,
    /// Threshold on `|I_{g_t}(ġ_t)|` in stage (a).
    pub ray_tol: f64,
    /// Multiple of the grid floor allowed in stages (b) and (d).
    pub floor_factor: f64,
    /// Verification points: rings × spokes inside the disk.
    pub rings: usize,
    pub spokes: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            decompose: DecomposeOptions::default(),
            rays: 12,
            seed: 7,
            ray_tol: KERNEL_TOL,
            floor_factor: 10.0,
            rings: 6,
            spokes: 12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageReport {
    pub stage: char,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl StageReport {
    fn new(stage: char, residual: f64, threshold: f64) -> Self {
        StageReport { stage, residual, threshold, pass: residual <= threshold }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub floor: f64,
    pub times: Vec<f64>,
    pub stages: Vec<StageReport>,
    /// `(t, max_x |f_t* g_t − g₀|_{g₀})` over interior verification points.
    pub pullback_residual: Vec<(f64, f64)>,
    /// `max |f_t(x) − φ_t⁻¹(x)|` when the family is a known pullback.
    pub inverse_error: Option<f64>,
}

impl PipelineReport {
    pub fn failure(&self) -> Option<&StageReport> {
        self.stages.iter().find(|s| !s.pass)
    }

    pub fn passed(&self) -> bool {
        self.stages.len() == 4 && self.failure().is_none()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("stage,residual,threshold,pass\n");
        for s in &self.stages {
            let _ = writeln!(out, "{},{:.6e},{:.6e},{}", s.stage, s.residual, s.threshold, s.pass);
        }
        out
    }
}

/// Decomposition of `ġ_s` with respect to `g_s`, or `None` for a zero velocity.
struct Witness {
    metric: MetricField,
    dec: Option<Decomposition>,
}

impl Witness {
    /// `−v♯` at `p`: the velocity of `f_t`.
    fn drift(&self, p: Point<f64>) -> [f64; 2] {
        let Some(dec) = &self.dec else { return [0.0, 0.0] };
        let v = dec.v_at(p);
        if v == [0.0, 0.0] {
            return v;
        }
        let w = self.metric.value(p).inverse().apply(v);
        [-w[0], -w[1]]
    }
}

fn rk4_step(nodes: &[Witness], k: usize, h: f64, p: Point<f64>) -> Point<f64> {
    let shift = |p: Point<f64>, d: [f64; 2], s: f64| Point::new(p.x + s * d[0], p.y + s * d[1]);
    let k1 = nodes[2 * k].drift(p);
    let k2 = nodes[2 * k + 1].drift(shift(p, k1, 0.5 * h));
    let k3 = nodes[2 * k + 1].drift(shift(p, k2, 0.5 * h));
    let k4 = nodes[2 * k + 2].drift(shift(p, k3, h));
    Point::new(p.x + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]), p.y + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]))
}

fn uniform_grid(ts: &[f64]) -> Result<f64> {
    let bad = || GeomError::InvalidInput("t-grid must start at 0 and be uniform".into());
    if ts.len() < 2 || ts[0] != 0.0 {
        return Err(bad());
    }
    let step = ts[1] - ts[0];
    if step <= 0.0 || ts.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > 1e-12) {
        return Err(bad());
    }
    Ok(step)
}

/// Runs the four stages, stopping at the first failing one:
/// (a) `I_{g_t}(ġ_t) ≈ 0` on sampled boundary pairs, (b) `ġ_t ≈ d^{g_t} v_t`
/// on `M`, (c) the flow `∂ₜ f_t = −v_t♯ ∘ f_t` is the identity outside `M`,
/// (d) `f_t* g_t ≈ g₀` at verification points.
pub fn run_pipeline(family: &MetricFamily, disk: &CdrmDisk, ts: &[f64], opts: &PipelineOptions) -> Result<PipelineReport> {
    let step = uniform_grid(ts)?;
    let floor = grid_floor(disk, &opts.decompose)?;
    let mut report = PipelineReport { floor, times: ts.to_vec(), stages: Vec::new(), pullback_residual: Vec::new(), inverse_error: None };

    // (a)
    let pairs = ideal_pairs(opts.seed, opts.rays, 0.3);
    let jobs: Vec<(f64, IdealPoint, IdealPoint)> = ts.iter().flat_map(|&t| pairs.iter().map(move |&(a, b)| (t, a, b))).collect();
    let max_ray = jobs
        .par_iter()
        .map(|&(t, xi, eta)| Ok(ray_transform(&family.metric_at(t)?, &family.velocity_at(t), xi, eta)?.value.abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    report.stages.push(StageReport::new('a', max_ray, opts.ray_tol));
    if report.failure().is_some() {
        return Ok(report);
    }

    // (b) witnesses at the RK4 nodes, spacing h/2 with h = step/4
    let h = step / 4.0;
    let n_steps = 4 * (ts.len() - 1);
    let nodes = (0..=2 * n_steps)
        .into_par_iter()
        .map(|k| {
            let s = 0.5 * h * k as f64;
            let metric = family.metric_at(s)?;
            let gdot = family.velocity_at(s);
            let dec = if gdot.is_zero() { None } else { Some(decompose_with(&metric, disk.radius, &gdot, &opts.decompose)?) };
            Ok(Witness { metric, dec })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_sol = nodes.iter().filter_map(|w| w.dec.as_ref()).map(|d| d.relative_solenoidal()).fold(0.0, f64::max);
    let threshold = opts.floor_factor * floor;
    report.stages.push(StageReport::new('b', max_sol, threshold));
    if report.failure().is_some() {
        return Ok(report);
    }

    // (c) flow interior stencils and exterior points
    let fd = disk.radius / (opts.decompose.n_r as f64 - 0.5);
    let mut centres = Vec::new();
    for a in 0..opts.rings {
        let r = disk.radius * (a as f64 + 0.5) / opts.rings as f64;
        for b in 0..opts.spokes {
            centres.push(Point::polar(r, std::f64::consts::TAU * (b as f64 + 0.25 * a as f64) / opts.spokes as f64));
        }
    }
    let mut outside = Vec::new();
    for r in [disk.radius + 1e-3, 0.5 * (1.0 + disk.radius), 0.95] {
        for b in 0..opts.spokes {
            outside.push(Point::polar(r, std::f64::consts::TAU * b as f64 / opts.spokes as f64));
        }
    }
    let stencil =
        |c: Point<f64>| [c, Point::new(c.x + fd, c.y), Point::new(c.x - fd, c.y), Point::new(c.x, c.y + fd), Point::new(c.x, c.y - fd)];
    let mut points: Vec<Point<f64>> = centres.iter().flat_map(|&c| stencil(c)).collect();
    let n_inside = points.len();
    points.extend(outside.iter().copied());
    // positions at every grid time
    let per_step = n_steps / (ts.len() - 1);
    let flows: Vec<Vec<Point<f64>>> = points
        .par_iter()
        .map(|&x| {
            let mut out = vec![x];
            let mut p = x;
            for k in 0..n_steps {
                p = rk4_step(&nodes, k, h, p);
                if (k + 1) % per_step == 0 {
                    out.push(p);
                }
            }
            out
        })
        .collect();
    let displacement =
        flows[n_inside..].iter().zip(&outside).flat_map(|(f, x)| f.iter().map(move |p| (p.x - x.x).hypot(p.y - x.y))).fold(0.0, f64::max);
    report.stages.push(StageReport::new('c', displacement, 0.0));
    if report.failure().is_some() {
        return Ok(report);
    }

    // (d)
    let g0 = MetricField::base();
    let mut worst: f64 = 0.0;
    for (i, &t) in ts.iter().enumerate() {
        let g = family.metric_at(t)?;
        let mut max_t: f64 = 0.0;
        for (c, st) in centres.iter().zip(flows[..n_inside].chunks(5)) {
            let [f0, fxp, fxm, fyp, fym] = [&st[0][i], &st[1][i], &st[2][i], &st[3][i], &st[4][i]];
            let col_x = [(fxp.x - fxm.x) / (2.0 * fd), (fxp.y - fxm.y) / (2.0 * fd)];
            let col_y = [(fyp.x - fym.x) / (2.0 * fd), (fyp.y - fym.y) / (2.0 * fd)];
            let gt = g.value(*f0);
            let pulled = Sym2::new(gt.quad(col_x), gt.bilinear(col_x, col_y), gt.quad(col_y));
            let base = g0.value(*c);
            max_t = max_t.max(tensor_norm(&base, &pulled.sub(&base)));
        }
        report.pullback_residual.push((t, max_t));
        worst = worst.max(max_t);
    }
    if let FamilyKind::Pullback(tw) = family.kind() {
        let mut err: f64 = 0.0;
        for (c, st) in centres.iter().zip(flows[..n_inside].chunks(5)) {
            for (i, &t) in ts.iter().enumerate() {
                let want = tw.inverse(t, *c);
                err = err.max((st[0][i].x - want.x).hypot(st[0][i].y - want.y));
            }
        }
        report.inverse_error = Some(err);
    }
    report.stages.push(StageReport::new('d', worst, threshold));
    Ok(report)
}

/// [`run_pipeline`] with a failing stage turned into `PipelineStageFailure`.
pub fn triviality_reconstruction(family: &MetricFamily, disk: &CdrmDisk, ts: &[f64], opts: &PipelineOptions) -> Result<PipelineReport> {
    let report = run_pipeline(family, disk, ts, opts)?;
    match report.failure() {
        Some(s) => Err(GeomError::PipelineStageFailure { stage: s.stage, residual: s.residual }),
        None => Ok(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{AnisotropicBump, Bump, ConformalBump, Twist};

    fn conformal_family(eps: f64) -> MetricFamily {
        MetricFamily::linear(SymTensorField::analytic(ConformalBump { eps, bump: Bump::centered(0.5) }))
    }

    #[test]
    fn distance_variation_on_conformal_family() {
        let fam = conformal_family(0.05);
        let (p, q) = (Point::new(-0.8, 0.0), Point::new(0.8, 0.0));
        for t in [0.0, 0.5, 1.0] {
            let row = distance_variation_check(&fam, p, q, t, DEFAULT_DT).unwrap();
            assert!(row.rel_err < 1e-4, "{row:?}");
        }
        let row = distance_variation_check(&MetricFamily::constant(), p, q, 0.3, DEFAULT_DT).unwrap();
        assert_eq!((row.lhs, row.rhs), (0.0, 0.0));
    }

    #[test]
    fn schwarzian_variation_on_conformal_family() {
        let fam = conformal_family(0.05);
        let pairs = [(IdealPoint::new(0.0), IdealPoint::new(std::f64::consts::PI))];
        let rep = schwarzian_variation_check(&fam, &pairs, &[0.0, 0.5, 1.0], DEFAULT_DT).unwrap();
        println!("{}{:?}", rep.to_csv(), rep.order);
        assert!(rep.max_rel_err() < 1e-3);
        assert!(rep.order.unwrap() > 1.8);
    }

    #[test]
    fn volume_estimate_cases() {
        let disk = CdrmDisk::new(MetricField::base(), 0.7).unwrap();
        let zero = volume_inequality_check(&disk, &SymTensorField::zero(), VOLUME_SUP_CAP);
        assert_eq!(zero.status, VolumeStatus::Holds);
        let shrink = SymTensorField::analytic(ConformalBump { eps: -2e-3, bump: Bump::centered(0.5) });
        let r = volume_inequality_check(&disk, &shrink, VOLUME_SUP_CAP);
        assert!(r.volume_change < 0.0);
        assert_eq!(r.status, VolumeStatus::Holds);
        let aniso = SymTensorField::analytic(AnisotropicBump { eps: 1e-3, bump: Bump::centered(0.5), angle: 0.3 });
        let r = volume_inequality_check(&disk, &aniso, VOLUME_SUP_CAP);
        assert!(r.volume_change < 0.0 && r.inner.abs() < 1e-12, "{r:?}");
        assert_eq!(r.status, VolumeStatus::Holds);
    }

    fn coarse() -> PipelineOptions {
        let mut opts = PipelineOptions::default();
        opts.decompose.n_r = 32;
        opts.decompose.n_theta = 64;
        opts
    }

    #[test]
    fn pipeline_recovers_inverse_twist() {
        let disk = CdrmDisk::new(MetricField::base(), 0.7).unwrap();
        let fam = MetricFamily::pullback(Twist { alpha: 0.5, r0: 0.5 });
        let r = triviality_reconstruction(&fam, &disk, &[0.0, 0.5, 1.0], &coarse()).unwrap();
        assert!(r.passed());
        assert!(r.inverse_error.unwrap() < 1e-3);
        assert_eq!(r.stages[2].residual, 0.0);
    }

    #[test]
    fn pipeline_constant_family_is_identity() {
        let disk = CdrmDisk::new(MetricField::base(), 0.7).unwrap();
        let r = run_pipeline(&MetricFamily::constant(), &disk, &[0.0, 0.5, 1.0], &coarse()).unwrap();
        assert!(r.passed());
        assert!(r.pullback_residual.iter().all(|&(_, e)| e < 1e-12));
    }

    #[test]
    fn pipeline_stops_at_stage_a_for_conformal_family() {
        let disk = CdrmDisk::new(MetricField::base(), 0.7).unwrap();
        let err = triviality_reconstruction(&conformal_family(0.05), &disk, &[0.0, 1.0], &coarse()).unwrap_err();
        assert!(matches!(err, GeomError::PipelineStageFailure { stage: 'a', residual } if residual > 1e-3));
    }

    #[test]
    fn pipeline_rejects_bad_grid() {
        let disk = CdrmDisk::new(MetricField::base(), 0.7).unwrap();
        let fam = MetricFamily::pullback(Twist { alpha: 0.5, r0: 0.5 });
        assert!(run_pipeline(&fam, &disk, &[0.1, 0.5], &PipelineOptions::default()).is_err());
    }
}
