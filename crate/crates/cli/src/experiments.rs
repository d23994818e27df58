//! One function per subcommand. Each returns the tables, plots and checks of
//! the run; nothing here touches the filesystem.

use std::fmt::Write as _;

use rayon::prelude::*;

use hyperdeform::boundary::{cross_ratio, moebius_deviation};
use hyperdeform::chart::Point;
use hyperdeform::fields::{AnisotropicBump, BasePotential, Bump, BumpOneForm, ConformalBump};
use hyperdeform::geodesic::escape_radius;
use hyperdeform::metric::curvature_scan;
use hyperdeform::raytransform::{
    adjointness_defect, cdrm_ray_transform, decompose_with, grid_floor, potential_kernel_check, solenoidal_decompose, CdrmDisk,
    DecomposeOptions,
};
use hyperdeform::sampling::{bump_one_forms, crossing_pairs, entry_angles, ideal_pairs, lines_through, point_pairs, quadruples};
use hyperdeform::schwarzian::{distance_gap_scan, ray_vs_schwarzian, schwarzian_csv, schwarzian_scan};
use hyperdeform::variation::{
    distance_variation_check, run_pipeline, schwarzian_variation_check, volume_inequality_check, PipelineOptions, VolumeStatus,
};
use hyperdeform::{GeomError, MetricField, OneFormField, Result, SymTensorField};

use crate::config::{Experiment, ExperimentConfig, FamilyName};
use crate::output::{Check, Outcome, Verdict};
use crate::svg::{Chart, Series};

/// Minimum angular gap of sampled boundary pairs.
const MIN_GAP: f64 = 0.3;
/// Hyperbolic radius of sampled point pairs for the gap scan.
const GAP_RADIUS: f64 = 3.0;

pub fn run(experiment: Experiment, cfg: &ExperimentConfig) -> Result<Outcome> {
    match experiment {
        Experiment::Curvature => curvature(cfg),
        Experiment::Moebius => moebius(cfg),
        Experiment::Schwarzian => schwarzian(cfg),
        Experiment::Raytransform => raytransform(cfg),
        Experiment::Kernel => kernel(cfg),
        Experiment::Decompose => decompose(cfg),
        Experiment::Variation => variation(cfg),
        Experiment::Pipeline => pipeline(cfg),
        Experiment::Volume => volume(cfg),
    }
}

fn metric(cfg: &ExperimentConfig) -> Result<MetricField> {
    cfg.deformation.family().metric_at(cfg.deformation.t)
}

fn decompose_options(cfg: &ExperimentConfig) -> DecomposeOptions {
    DecomposeOptions { n_r: cfg.grid.n_r, n_theta: cfg.grid.n_theta, ..Default::default() }
}

/// The `K ≤ 0` gate; a violation is reported with the error text.
fn gate(g: &MetricField, resolution: usize, label: &str) -> Check {
    let rep = curvature_scan(g, resolution, 0.0);
    let name = format!("curvature gate {label}");
    if rep.pass {
        Check::at_most(&name, rep.max_k, 0.0)
    } else {
        let err = GeomError::HypothesisViolation { x: rep.worst.x, y: rep.worst.y, value: rep.max_k, bound: 0.0 };
        Check { name, value: rep.max_k, condition: err.to_string(), verdict: Verdict::Fail }
    }
}

/// Runs the gate at the given times; `Some(outcome)` stops the experiment.
fn gated(cfg: &ExperimentConfig, times: &[f64]) -> Result<Option<Outcome>> {
    let family = cfg.deformation.family();
    let mut checks = Vec::new();
    for &t in times {
        checks.push(gate(&family.metric_at(t)?, cfg.sampler.curvature_resolution, &format!("t={t}")));
    }
    let failed = checks.iter().any(|c| c.verdict == Verdict::Fail);
    Ok(failed.then(|| Outcome { checks, ..Default::default() }))
}

fn detection(cfg: &ExperimentConfig, name: &str, value: f64, floor: f64) -> Check {
    if cfg.deformation.is_trivial() {
        Check::at_most(name, value, floor)
    } else {
        Check::at_least(name, value, cfg.tolerances.detection_factor * floor)
    }
}

fn curvature(cfg: &ExperimentConfig) -> Result<Outcome> {
    let g = metric(cfg)?;
    let res = cfg.sampler.curvature_resolution;
    let reach = if g.is_base() { cfg.deformation.r0 } else { g.support_radius() };
    let mut report = String::from("r,k_0,k_quarter,k_half,k_three_quarter\n");
    let mut series: Vec<Vec<(f64, f64)>> = vec![Vec::new(); 4];
    for i in 0..=100 {
        let r = 1.1 * reach * i as f64 / 100.0;
        let ks: Vec<f64> =
            (0..4).map(|k| g.gaussian_curvature(Point::polar(r, 0.5 * std::f64::consts::PI * k as f64))).collect::<Result<_>>()?;
        let _ = writeln!(report, "{r:.6},{:.10e},{:.10e},{:.10e},{:.10e}", ks[0], ks[1], ks[2], ks[3]);
        for (s, k) in series.iter_mut().zip(&ks) {
            s.push((r, *k));
        }
    }
    let mut history = String::from("resolution,samples,max_k,min_k\n");
    for n in [res / 4, res / 2, res] {
        let rep = curvature_scan(&g, n.max(2), 0.0);
        let _ = writeln!(history, "{},{},{:.10e},{:.10e}", n.max(2), rep.samples, rep.max_k, rep.min_k);
    }
    let pinched = curvature_scan(&g, res, -1.0 + hyperdeform::metric::CURVATURE_SLACK);
    let checks = vec![
        gate(&g, res, &format!("t={}", cfg.deformation.t)),
        Check::info("max K against the pinched bound K <= -1", pinched.max_k, if pinched.pass { "holds" } else { "does not hold" }),
        Check::info("min K", pinched.min_k, "sampled"),
    ];
    let mut chart = Chart::new("Gaussian curvature along rays", "chart radius", "K");
    for (name, pts) in ["theta=0", "theta=pi/2", "theta=pi", "theta=3pi/2"].iter().zip(series) {
        chart = chart.with(Series::line(name, pts));
    }
    Ok(Outcome { report, history, plots: vec![("profile".into(), chart)], checks, ..Default::default() })
}

fn moebius(cfg: &ExperimentConfig) -> Result<Outcome> {
    if let Some(stop) = gated(cfg, &[cfg.deformation.t])? {
        return Ok(stop);
    }
    let g0 = MetricField::base();
    let g = metric(cfg)?;
    let quads = quadruples(cfg.seed(), cfg.sampler.quadruples_near, cfg.sampler.quadruples_spread);
    let x = Point::origin();
    let rep = moebius_deviation(&g0, &g, x, &quads)?;
    let mut history = String::from("quadruple,t,cross_ratio\n");
    if let Some(q) = quads.first() {
        for (t, v) in cross_ratio(&g, x, q)?.history {
            let _ = writeln!(history, "0,{t},{v:.15e}");
        }
    }
    let pts: Vec<(f64, f64)> = rep.rows.iter().enumerate().map(|(i, r)| (i as f64, r.deviation)).collect();
    let chart = Chart::new("cross-ratio deviation", "quadruple", "|log ratio|").log().with(Series::points("deviation", pts));
    let checks = vec![detection(cfg, "max cross-ratio deviation", rep.max_deviation, cfg.tolerances.moebius)];
    Ok(Outcome { report: rep.to_csv(), history, plots: vec![("deviation".into(), chart)], checks, ..Default::default() })
}

fn schwarzian(cfg: &ExperimentConfig) -> Result<Outcome> {
    if let Some(stop) = gated(cfg, &[cfg.deformation.t])? {
        return Ok(stop);
    }
    let g0 = MetricField::base();
    let g = metric(cfg)?;
    let pairs = ideal_pairs(cfg.seed(), cfg.sampler.pairs, MIN_GAP);
    let rows = schwarzian_scan(&g0, &g, &pairs)?;
    let mut history = String::from("pair,method,parameter,value\n");
    for (i, r) in rows.iter().enumerate() {
        for (p, v) in &r.limit.history {
            let _ = writeln!(history, "{i},limit,{p},{v:.15e}");
        }
        for (p, v) in &r.derivative.history {
            let _ = writeln!(history, "{i},derivative,{p},{v:.15e}");
        }
    }
    let max_diff = rows.iter().map(|r| r.difference()).fold(0.0, f64::max);
    let max_s = rows.iter().map(|r| r.limit.value.abs()).fold(0.0, f64::max);

    let points = point_pairs(cfg.seed().wrapping_add(1), cfg.sampler.points, GAP_RADIUS);
    let ball = escape_radius(&g, None).max(cfg.deformation.r0);
    let gaps = distance_gap_scan(&g0, &g, &points, ball)?;

    let checks = vec![
        Check::at_most("max |S_limit - S_derivative|", max_diff, cfg.tolerances.cross_method),
        detection(cfg, "max |S|", max_s, cfg.tolerances.schwarzian),
        Check::at_most("max distance gap", gaps.max_gap, gaps.bound),
        Check::cond("gaps of chords avoiding B", if gaps.exact_zeros { 0.0 } else { 1.0 }, "exactly zero".into(), gaps.exact_zeros),
        Check::info("diam_g(B)", gaps.diam_g, "computed"),
        Check::info("diam_g0(B)", gaps.diam_g0, "closed form"),
    ];
    let idx = |f: &dyn Fn(&hyperdeform::schwarzian::SchwarzianRow) -> f64| -> Vec<(f64, f64)> {
        rows.iter().enumerate().map(|(i, r)| (i as f64, f(r))).collect()
    };
    let s_chart = Chart::new("integrated Schwarzian", "pair", "S")
        .with(Series::points("limit", idx(&|r| r.limit.value)))
        .with(Series::points("derivatives", idx(&|r| r.derivative.value)));
    let gap_chart = Chart::new("distance gap", "pair", "|d_g - d_g0|")
        .with(Series::points("gap", gaps.rows.iter().enumerate().map(|(i, r)| (i as f64, r.gap)).collect()))
        .with(Series::line("bound", vec![(0.0, gaps.bound), (gaps.rows.len().max(1) as f64 - 1.0, gaps.bound)]));
    Ok(Outcome {
        report: schwarzian_csv(&rows),
        history,
        extra: vec![("gaps.csv".into(), gaps.to_csv())],
        plots: vec![("schwarzian".into(), s_chart), ("gaps".into(), gap_chart)],
        checks,
    })
}

fn raytransform(cfg: &ExperimentConfig) -> Result<Outcome> {
    if let Some(stop) = gated(cfg, &[cfg.deformation.t])? {
        return Ok(stop);
    }
    let g0 = MetricField::base();
    let g = metric(cfg)?;
    let pairs = ideal_pairs(cfg.seed(), cfg.sampler.pairs, MIN_GAP);
    let rows = pairs.par_iter().map(|&(xi, eta)| ray_vs_schwarzian(&g0, &g, xi, eta)).collect::<Result<Vec<_>>>()?;
    let mut report = String::from("xi,eta,ray_transform,twice_schwarzian,slack\n");
    for r in &rows {
        let _ = writeln!(report, "{:.10},{:.10},{:.12e},{:.12e},{:.6e}", r.xi.theta(), r.eta.theta(), r.lhs, r.rhs, r.slack);
    }
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);

    let disk = CdrmDisk::new(g0.clone(), cfg.grid.radius)?;
    let h = g.perturbation().clone();
    let entries = entry_angles(cfg.seed().wrapping_add(1), cfg.sampler.entry_angles, cfg.sampler.entry_directions);
    let sino = entries
        .par_iter()
        .map(|&(th, a)| {
            let (x, v) = disk.entry_state(th, a);
            let r = cdrm_ray_transform(&disk, &h, x, v)?;
            Ok((th, a, r.value, r.error))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sinogram = String::from("entry_angle,direction_angle,value\n");
    let mut history = String::from("entry_angle,direction_angle,quadrature_error\n");
    for (th, a, v, e) in &sino {
        let _ = writeln!(sinogram, "{th:.10},{a:.10},{v:.12e}");
        let _ = writeln!(history, "{th:.10},{a:.10},{e:.3e}");
    }
    let checks = vec![
        Check::at_least("min slack I(g - g0) - 2S", min_slack, -cfg.tolerances.slack),
        Check::info("max chord quadrature error", sino.iter().map(|s| s.3).fold(0.0, f64::max), "|Simpson - augmented|"),
    ];
    let chart = Chart::new("ray transform against twice the Schwarzian", "pair", "value")
        .with(Series::points("I(g - g0)", rows.iter().enumerate().map(|(i, r)| (i as f64, r.lhs)).collect()))
        .with(Series::points("2S", rows.iter().enumerate().map(|(i, r)| (i as f64, r.rhs)).collect()));
    Ok(Outcome { report, history, extra: vec![("sinogram.csv".into(), sinogram)], plots: vec![("slack".into(), chart)], checks })
}

fn kernel(cfg: &ExperimentConfig) -> Result<Outcome> {
    if let Some(stop) = gated(cfg, &[cfg.deformation.t])? {
        return Ok(stop);
    }
    let g = metric(cfg)?;
    let r0 = cfg.deformation.r0;
    let forms = bump_one_forms(cfg.seed(), cfg.sampler.forms, r0);
    let rays = lines_through(cfg.seed().wrapping_add(1), cfg.sampler.rays, r0);
    let mut report = String::from("form,scale,xi,eta,value\n");
    let mut history = String::from("form,scale,max_abs\n");
    let mut checks = Vec::new();
    let mut chart = Chart::new("ray transform of potential tensors", "ray", "|I(d v)|").log();
    for (i, v) in forms.iter().enumerate() {
        for scale in [1.0, 10.0] {
            let rep = potential_kernel_check(&g, &OneFormField::analytic(v.scaled(scale)), &rays)?;
            for ((xi, eta), val) in rep.rays.iter().zip(&rep.values) {
                let _ = writeln!(report, "{i},{scale},{:.10},{:.10},{val:.6e}", xi.theta(), eta.theta());
            }
            let _ = writeln!(history, "{i},{scale},{:.6e}", rep.max_abs);
            checks.push(Check::at_most(&format!("form {i} scale {scale} max |I(d v)|"), rep.max_abs, cfg.tolerances.kernel));
            if scale == 1.0 {
                let pts = rep.values.iter().enumerate().map(|(k, v)| (k as f64, *v)).collect();
                chart = chart.with(Series::points(&format!("form {i}"), pts));
            }
        }
    }
    Ok(Outcome { report, history, plots: vec![("kernel".into(), chart)], checks, ..Default::default() })
}

/// Manufactured 1-form for the decomposition, scaled with the disk.
fn manufactured_form(radius: f64) -> BumpOneForm {
    let s = radius / 0.7;
    BumpOneForm { bump: Bump { center: [-0.1 * s, 0.2 * s], radius: 0.4 * s }, a: [0.2, 0.5], b: [[0.0, 0.3], [0.1, -0.4]] }
}

fn decompose(cfg: &ExperimentConfig) -> Result<Outcome> {
    if let Some(stop) = gated(cfg, &[cfg.deformation.t])? {
        return Ok(stop);
    }
    let g = metric(cfg)?;
    let opts = decompose_options(cfg);
    let disk = CdrmDisk::new(MetricField::base(), cfg.grid.radius)?;
    let floor = grid_floor(&disk, &opts)?;
    let v0 = manufactured_form(cfg.grid.radius);
    let man = solenoidal_decompose(&disk, &SymTensorField::analytic(BasePotential { v: v0 }), &opts)?;
    let v_err = man.v_error(&OneFormField::analytic(v0));
    let h = g.perturbation().clone();
    let probe = if h.is_zero() {
        SymTensorField::analytic(ConformalBump { eps: 1.0, bump: Bump::centered(cfg.deformation.r0) })
    } else {
        h.clone()
    };
    let adj = adjointness_defect(&disk, &v0, &probe, &opts)?;
    let dec = decompose_with(&MetricField::base(), cfg.grid.radius, &h, &opts)?;

    let mut history = String::from("case,iterations,solver_residual,relative_solenoidal\n");
    for (name, d) in [("manufactured", &man), ("deformation", &dec)] {
        let _ = writeln!(history, "{name},{},{:.3e},{:.6e}", d.iterations, d.solver_residual, d.relative_solenoidal());
    }
    let mut checks = vec![
        Check::info("grid floor", floor, &format!("{}x{}", opts.n_r, opts.n_theta)),
        Check::at_most("manufactured relative ||s||", man.relative_solenoidal(), floor),
        Check::at_most("manufactured relative v error", v_err, floor),
        Check::at_most("adjointness defect", adj, floor),
    ];
    let rel = dec.relative_solenoidal();
    match cfg.deformation.family {
        FamilyName::Conformal if cfg.deformation.eps != 0.0 => {
            checks.push(Check::at_least("deformation relative ||s||", rel, cfg.tolerances.detection_factor * floor))
        }
        _ => checks.push(Check::info("deformation relative ||s||", rel, "not asserted for this family")),
    }
    let n = 60;
    let profile = |f: &dyn Fn(Point<f64>) -> f64| -> Vec<(f64, f64)> {
        (0..=n)
            .map(|i| {
                let x = -cfg.grid.radius + 2.0 * cfg.grid.radius * i as f64 / n as f64;
                (x, f(Point::new(x, 0.0)))
            })
            .collect()
    };
    let exact = OneFormField::analytic(v0);
    let chart = Chart::new("manufactured potential along the x-axis", "x", "v_y")
        .with(Series::line("exact", profile(&|p| exact.value(p)[1])))
        .with(Series::points("recovered", profile(&|p| man.v_at(p)[1])));
    Ok(Outcome { report: dec.to_csv(), history, plots: vec![("potential".into(), chart)], checks, ..Default::default() })
}

fn variation(cfg: &ExperimentConfig) -> Result<Outcome> {
    let ts = &cfg.sampler.t_grid;
    if let Some(stop) = gated(cfg, ts)? {
        return Ok(stop);
    }
    let family = cfg.deformation.family();
    let tol = &cfg.tolerances;
    let pairs = ideal_pairs(cfg.seed(), cfg.sampler.pairs, MIN_GAP);
    let rep = schwarzian_variation_check(&family, &pairs, ts, tol.dt)?;

    let r0 = cfg.deformation.r0;
    let points = crossing_pairs(cfg.seed().wrapping_add(1), cfg.sampler.distance_pairs, (r0 + 0.05).min(0.95), (r0 + 0.35).min(0.95));
    let t_dist = [ts[0], ts[ts.len() / 2], ts[ts.len() - 1]];
    let jobs: Vec<_> = points.iter().flat_map(|&(p, q)| t_dist.iter().map(move |&t| (p, q, t))).collect();
    let dist = jobs.par_iter().map(|&(p, q, t)| distance_variation_check(&family, p, q, t, tol.dt)).collect::<Result<Vec<_>>>()?;
    let max_dist = dist.iter().map(|r| r.rel_err).fold(0.0, f64::max);

    let mut distance_csv = String::from("case,t,lhs,rhs,abs_err,rel_err\n");
    for r in &dist {
        let _ = writeln!(distance_csv, "{},{:.6},{:.12e},{:.12e},{:.3e},{:.3e}", r.case, r.t, r.lhs, r.rhs, r.abs_err, r.rel_err);
    }
    let mut checks = vec![Check::at_most("Schwarzian variation max relative error", rep.max_rel_err(), tol.variation)];
    match rep.order {
        Some(o) => checks.push(Check::at_least("finite-difference order", o, tol.order)),
        None => checks.push(Check::info("finite-difference order", 0.0, "no measurable signal")),
    }
    checks.push(Check::at_most("distance variation max relative error", max_dist, tol.distance_variation));

    let mut chart = Chart::new("first variation of 2S", "t", "value");
    if let Some(first) = rep.rows.first() {
        let sel: Vec<_> = rep.rows.iter().filter(|r| r.case == first.case).collect();
        chart = chart
            .with(Series::line("d/dt 2S", sel.iter().map(|r| (r.t, r.lhs)).collect()))
            .with(Series::points("I(g_t')", sel.iter().map(|r| (r.t, r.rhs)).collect()));
    }
    let err_chart = Chart::new("relative error", "t", "rel error")
        .log()
        .with(Series::points("Schwarzian", rep.rows.iter().map(|r| (r.t, r.rel_err)).collect()))
        .with(Series::points("distance", dist.iter().map(|r| (r.t, r.rel_err)).collect()));
    Ok(Outcome {
        report: rep.to_csv(),
        history: rep.history_csv(),
        extra: vec![("distance.csv".into(), distance_csv)],
        plots: vec![("variation".into(), chart), ("errors".into(), err_chart)],
        checks,
    })
}

fn pipeline(cfg: &ExperimentConfig) -> Result<Outcome> {
    let ts = &cfg.sampler.t_grid;
    if let Some(stop) = gated(cfg, ts)? {
        return Ok(stop);
    }
    let family = cfg.deformation.family();
    let disk = CdrmDisk::new(MetricField::base(), cfg.grid.radius)?;
    let opts = PipelineOptions {
        decompose: decompose_options(cfg),
        rays: cfg.sampler.pairs,
        seed: cfg.seed(),
        ray_tol: cfg.tolerances.kernel,
        floor_factor: cfg.tolerances.floor_factor,
        ..Default::default()
    };
    let rep = run_pipeline(&family, &disk, ts, &opts)?;
    let mut history = String::from("t,pullback_residual\n");
    for (t, r) in &rep.pullback_residual {
        let _ = writeln!(history, "{t},{r:.6e}");
    }
    let mut checks = vec![Check::info("grid floor", rep.floor, "decomposition")];
    for s in &rep.stages {
        checks.push(Check::info(
            &format!("stage {} residual", s.stage),
            s.residual,
            &format!("threshold {:e}, {}", s.threshold, if s.pass { "met" } else { "exceeded" }),
        ));
    }
    if cfg.deformation.is_trivial() {
        let worst = rep.failure().map_or(0.0, |s| s.residual);
        checks.push(Check::cond("trivial family reconstructed", worst, "all four stages pass".into(), rep.passed()));
        if let Some(e) = rep.inverse_error {
            checks.push(Check::info("max |f_t - phi_t^-1|", e, "chart distance"));
        }
    } else {
        let first = rep.failure().map(|s| s.stage);
        let residual = rep.stages.first().map_or(0.0, |s| s.residual);
        checks.push(Check::cond("non-trivial family stops at stage a", residual, format!("failing stage {first:?}"), first == Some('a')));
    }
    let chart = Chart::new("pullback residual", "t", "max |f_t* g_t - g0|")
        .with(Series::line("residual", rep.pullback_residual.clone()))
        .with(Series::line("gate", ts.iter().map(|&t| (t, cfg.tolerances.floor_factor * rep.floor)).collect()));
    Ok(Outcome { report: rep.to_csv(), history, plots: vec![("pullback".into(), chart)], checks, ..Default::default() })
}

/// Five small volume-nonincreasing fields built from the configured support.
pub fn volume_panel(r0: f64, amplitude: f64) -> Vec<(&'static str, SymTensorField)> {
    let b = Bump::centered(r0);
    let off = Bump { center: [0.2 * r0, -0.2 * r0], radius: 0.6 * r0 };
    let aniso = |angle: f64, eps: f64| SymTensorField::analytic(AnisotropicBump { eps, bump: b, angle });
    vec![
        ("shrinking conformal", SymTensorField::analytic(ConformalBump { eps: -amplitude, bump: b })),
        ("traceless anisotropic 0", aniso(0.0, amplitude)),
        ("traceless anisotropic 0.9", aniso(0.9, amplitude)),
        (
            "anisotropic plus shrink",
            aniso(0.4, amplitude).plus(&SymTensorField::analytic(ConformalBump { eps: -0.5 * amplitude, bump: b })),
        ),
        ("off-centre shrink", SymTensorField::analytic(ConformalBump { eps: -amplitude, bump: off })),
    ]
}

fn volume(cfg: &ExperimentConfig) -> Result<Outcome> {
    let cap = cfg.tolerances.volume_cap;
    let disk = CdrmDisk::new(MetricField::base(), cfg.grid.radius)?;
    // conformal bumps have g₀-norm √2 |ε|
    let amplitude = cfg.deformation.eps.abs().min(0.5 * cap);
    let mut report = String::from("field,sup_norm,volume_change,inner,bound,status\n");
    let mut checks = Vec::new();
    let mut pts = Vec::new();
    for (i, (name, f)) in volume_panel(cfg.deformation.r0, amplitude).into_iter().enumerate() {
        let r = volume_inequality_check(&disk, &f, cap);
        let status = match &r.status {
            VolumeStatus::Holds => "holds".to_string(),
            VolumeStatus::Violated => "violated".to_string(),
            VolumeStatus::HypothesisNotMet(why) => format!("hypothesis not met: {why}"),
        };
        let _ = writeln!(report, "{name},{:.6e},{:.6e},{:.6e},{:.6e},{status}", r.sup_norm, r.volume_change, r.inner, r.bound());
        pts.push((i as f64, r.bound() - r.inner));
        let label = format!("{name}: bound - inner");
        checks.push(match &r.status {
            VolumeStatus::HypothesisNotMet(why) => Check::info(&label, r.bound() - r.inner, why),
            _ => Check::at_least(&label, r.bound() - r.inner, 0.0),
        });
    }
    let chart = Chart::new("volume estimate margin", "field", "(2/3)|f|^2 - (g0, f)").with(Series::points("margin", pts));
    Ok(Outcome { report, history: String::from("field\n"), plots: vec![("margin".into(), chart)], checks, ..Default::default() })
}
