//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Sizes and tolerances are fixed here, not read from a file.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use hyperdeform::boundary::{gromov_product, visual_distance};
use hyperdeform::chart::Point;
use hyperdeform::geodesic::distance;
use hyperdeform::sampling::{hyperbolic_point, ideal_pairs, rng};
use hyperdeform::MetricField;
use hyperdeform_cli::config::{Experiment, ExperimentConfig, FamilyName};
use hyperdeform_cli::experiments::run;
use hyperdeform_cli::output::{strip_timestamp, Outcome, Verdict};

const SEED: u64 = 20;

struct Line {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn config(family: FamilyName) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.deformation.family = family;
    cfg.sampler.seed = Some(SEED);
    cfg
}

fn outcome(experiment: Experiment, cfg: &ExperimentConfig) -> Result<Outcome, String> {
    run(experiment, cfg).map_err(|e| format!("{experiment}: {e}"))
}

/// Value and verdict of the named check; a missing check fails.
fn check(o: &Outcome, name: &str) -> (f64, bool) {
    o.checks.iter().find(|c| c.name == name).map_or((f64::NAN, false), |c| (c.value, c.verdict == Verdict::Pass))
}

fn all_pass(o: &Outcome) -> bool {
    o.passed() && o.checks.iter().any(|c| c.verdict == Verdict::Pass)
}

fn hyperbolic_oracles() -> Result<Line, String> {
    let start = Instant::now();
    let g0 = MetricField::base();
    let mut r = rng(SEED);
    let points: Vec<Point<f64>> = (0..100).map(|_| hyperbolic_point(&mut r, 6.0)).collect();
    let pairs = ideal_pairs(SEED, 100, 0.05);
    let mut worst = [0.0f64; 3];
    for (p, &(xi, eta)) in points.iter().zip(&pairs) {
        let d = distance(&g0, Point::origin(), *p).map_err(|e| e.to_string())?;
        worst[0] = worst[0].max((d - 2.0 * p.norm().atanh()).abs());
        let half = 0.5 * (xi.theta() - eta.theta());
        let s = half.sin().abs();
        let gp = gromov_product(&g0, Point::origin(), xi, eta).map_err(|e| e.to_string())?.value;
        worst[1] = worst[1].max((gp + s.ln()).abs());
        let vd = visual_distance(&g0, Point::origin(), xi, eta).map_err(|e| e.to_string())?.value;
        worst[2] = worst[2].max((vd - s).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst[0] <= 1e-6 && worst[1] <= 1e-4 && worst[2] <= 1e-4 && secs <= 60.0;
    Ok(Line {
        name: "hyperbolic oracles",
        pass,
        detail: format!(
            "100 instances, distance {:.2e} (<= 1e-6), gromov {:.2e} (<= 1e-4), visual {:.2e} (<= 1e-4), {secs:.1}s (<= 60s)",
            worst[0], worst[1], worst[2]
        ),
    })
}

fn moebius_dichotomy(schwarzian: &[(FamilyName, Outcome)]) -> Result<Line, String> {
    let pb = outcome(Experiment::Moebius, &config(FamilyName::Pullback))?;
    let cf = outcome(Experiment::Moebius, &config(FamilyName::Conformal))?;
    let s_of = |f: FamilyName| schwarzian.iter().find(|(g, _)| *g == f).map(|(_, o)| check(o, "max |S|"));
    let (dp, dp_ok) = check(&pb, "max cross-ratio deviation");
    let (dc, dc_ok) = check(&cf, "max cross-ratio deviation");
    let (sp, sp_ok) = s_of(FamilyName::Pullback).unwrap_or((f64::NAN, false));
    let (sc, sc_ok) = s_of(FamilyName::Conformal).unwrap_or((f64::NAN, false));
    Ok(Line {
        name: "moebius detection",
        pass: dp_ok && dc_ok && sp_ok && sc_ok,
        detail: format!(
            "pullback deviation {dp:.2e} (<= 1e-5), |S| {sp:.2e} (<= 1e-6); conformal deviation {dc:.2e} (>= 1e-4), |S| {sc:.2e} (>= 1e-5)"
        ),
    })
}

fn cross_method(schwarzian: &[(FamilyName, Outcome)]) -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for (f, o) in schwarzian {
        let (v, ok) = check(o, "max |S_limit - S_derivative|");
        pass &= ok;
        parts.push(format!("{f:?} {v:.2e}"));
    }
    Line { name: "cross-method Schwarzian", pass, detail: format!("20 pairs, {} (<= 1e-3)", parts.join(", ")) }
}

fn gap_bound(schwarzian: &[(FamilyName, Outcome)]) -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for (f, o) in schwarzian {
        let (gap, ok) = check(o, "max distance gap");
        let (_, zeros) = check(o, "gaps of chords avoiding B");
        let bound = o.checks.iter().find(|c| c.name == "max distance gap").map_or(String::new(), |c| c.condition.clone());
        pass &= ok && zeros;
        parts.push(format!("{f:?} {gap:.2e} ({bound}, zeros {})", if zeros { "exact" } else { "not exact" }));
    }
    Line { name: "distance-gap bound", pass, detail: format!("200 pairs, {}", parts.join("; ")) }
}

fn variation_lines() -> Result<(Line, Line), String> {
    let start = Instant::now();
    let mut cfg = config(FamilyName::Conformal);
    cfg.sampler.pairs = 5;
    cfg.sampler.distance_pairs = 10;
    let o = outcome(Experiment::Variation, &cfg)?;
    let secs = start.elapsed().as_secs_f64();
    let (rel, rel_ok) = check(&o, "Schwarzian variation max relative error");
    let (order, order_ok) = check(&o, "finite-difference order");
    let (dist, dist_ok) = check(&o, "distance variation max relative error");
    Ok((
        Line {
            name: "Schwarzian first variation",
            pass: rel_ok && order_ok && secs <= 600.0,
            detail: format!("5 pairs x 5 t, relative {rel:.2e} (<= 1e-3), order {order:.2} (>= 1.8), {secs:.1}s (<= 600s)"),
        },
        Line { name: "distance first variation", pass: dist_ok, detail: format!("10 pairs x 3 t, relative {dist:.2e} (<= 1e-4)") },
    ))
}

fn kernel() -> Result<Line, String> {
    let o = outcome(Experiment::Kernel, &config(FamilyName::Constant))?;
    let worst = o.checks.iter().map(|c| c.value).fold(0.0, f64::max);
    Ok(Line {
        name: "kernel of the ray transform",
        pass: all_pass(&o) && o.checks.len() == 6,
        detail: format!("50 rays x 3 forms at amplitude 1 and 10, max |I(d v)| {worst:.2e} (<= 1e-6)"),
    })
}

fn decomposition() -> Result<Line, String> {
    let o = outcome(Experiment::Decompose, &config(FamilyName::Conformal))?;
    let (floor, _) = check(&o, "grid floor");
    let (s, _) = check(&o, "manufactured relative ||s||");
    let (v, _) = check(&o, "manufactured relative v error");
    let (adj, _) = check(&o, "adjointness defect");
    let (conf, _) = check(&o, "deformation relative ||s||");
    Ok(Line {
        name: "solenoidal decomposition",
        pass: all_pass(&o) && o.checks.len() == 5,
        detail: format!(
            "64x128, floor {floor:.2e}; manufactured ||s|| {s:.2e} and v error {v:.2e} (<= floor), adjointness {adj:.2e} (<= floor), conformal ||s|| {conf:.2e} (>= 10 floor)"
        ),
    })
}

fn ray_vs_schwarzian() -> Result<Line, String> {
    let mut pass = true;
    let mut parts = Vec::new();
    for f in [FamilyName::Conformal, FamilyName::Anisotropic, FamilyName::Pullback, FamilyName::Constant] {
        let mut cfg = config(f);
        cfg.sampler.pairs = 30;
        let o = outcome(Experiment::Raytransform, &cfg)?;
        let (slack, ok) = check(&o, "min slack I(g - g0) - 2S");
        pass &= ok;
        parts.push(format!("{f:?} {slack:.2e}"));
    }
    Ok(Line { name: "ray transform dominates 2S", pass, detail: format!("30 pairs, min slack {} (>= -1e-4)", parts.join(", ")) })
}

fn volume() -> Result<Line, String> {
    let o = outcome(Experiment::Volume, &config(FamilyName::Conformal))?;
    let margin = o.checks.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
    Ok(Line {
        name: "volume estimate",
        pass: all_pass(&o) && o.checks.iter().filter(|c| c.verdict == Verdict::Pass).count() == 5,
        detail: format!("5 fields, min (2/3)|f|^2 - (g0, f) = {margin:.2e} (>= 0)"),
    })
}

fn pipeline() -> Result<Line, String> {
    let start = Instant::now();
    let pb = outcome(Experiment::Pipeline, &config(FamilyName::Pullback))?;
    let cf = outcome(Experiment::Pipeline, &config(FamilyName::Conformal))?;
    let secs = start.elapsed().as_secs_f64();
    let (_, pb_ok) = check(&pb, "trivial family reconstructed");
    let (_, cf_ok) = check(&cf, "non-trivial family stops at stage a");
    let value = |o: &Outcome, n: &str| o.checks.iter().find(|c| c.name == n).map_or(f64::NAN, |c| c.value);
    let floor = value(&pb, "grid floor");
    Ok(Line {
        name: "triviality pipeline",
        pass: pb_ok && cf_ok && secs <= 900.0,
        detail: format!(
            "pullback residual {:.2e} (<= {:.2e}), displacement outside M {:.1e} (= 0); conformal stops at stage a {}; {secs:.1}s (<= 900s)",
            value(&pb, "stage d residual"),
            10.0 * floor,
            value(&pb, "stage c residual"),
            if cf_ok { "yes" } else { "no" }
        ),
    })
}

fn csv_contents(dir: &Path) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = e.map_err(|e| e.to_string())?.path();
        if path.extension().is_some_and(|x| x == "csv") {
            let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
            out.push((path.file_name().unwrap().to_string_lossy().into_owned(), strip_timestamp(&text)));
        }
    }
    out.sort();
    Ok(out)
}

fn reproducibility() -> Result<Line, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "[deformation]\nfamily = \"conformal\"\n[sampler]\nseed = 3\npairs = 6\npoints = 20\n")
        .map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for k in 0..2 {
        let dir = tmp.path().join(format!("run{k}"));
        let status = Command::new(env!("CARGO_BIN_EXE_hyperdeform"))
            .arg("schwarzian")
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(&dir)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        if !status.success() {
            return Err(format!("run {k} exited with {status}"));
        }
        runs.push(csv_contents(&dir)?);
    }
    let files = runs[0].len();
    Ok(Line {
        name: "reproducibility",
        pass: files > 0 && runs[0] == runs[1],
        detail: format!("{files} CSV files from two runs of one config, {}", if runs[0] == runs[1] { "identical" } else { "different" }),
    })
}

fn main() -> ExitCode {
    let schwarzian: Result<Vec<_>, String> = [FamilyName::Conformal, FamilyName::Anisotropic, FamilyName::Pullback]
        .into_iter()
        .map(|f| outcome(Experiment::Schwarzian, &config(f)).map(|o| (f, o)))
        .collect();
    let failed = |name: &'static str, e: String| Line { name, pass: false, detail: format!("error: {e}") };
    let mut lines = Vec::new();
    lines.push(hyperbolic_oracles().unwrap_or_else(|e| failed("hyperbolic oracles", e)));
    match &schwarzian {
        Ok(s) => {
            lines.push(moebius_dichotomy(s).unwrap_or_else(|e| failed("moebius detection", e)));
            lines.push(cross_method(s));
        }
        Err(e) => {
            lines.push(failed("moebius detection", e.clone()));
            lines.push(failed("cross-method Schwarzian", e.clone()));
        }
    }
    match variation_lines() {
        Ok((a, b)) => lines.extend([a, b]),
        Err(e) => lines.extend([failed("Schwarzian first variation", e.clone()), failed("distance first variation", e)]),
    }
    lines.push(kernel().unwrap_or_else(|e| failed("kernel of the ray transform", e)));
    lines.push(decomposition().unwrap_or_else(|e| failed("solenoidal decomposition", e)));
    lines.push(ray_vs_schwarzian().unwrap_or_else(|e| failed("ray transform dominates 2S", e)));
    lines.push(match &schwarzian {
        Ok(s) => gap_bound(s),
        Err(e) => failed("distance-gap bound", e.clone()),
    });
    lines.push(volume().unwrap_or_else(|e| failed("volume estimate", e)));
    lines.push(pipeline().unwrap_or_else(|e| failed("triviality pipeline", e)));
    lines.push(reproducibility().unwrap_or_else(|e| failed("reproducibility", e)));

    let mut ok = true;
    for (i, l) in lines.iter().enumerate() {
        ok &= l.pass;
        println!("{} {:>2} {}: {}", if l.pass { "PASS" } else { "FAIL" }, i + 1, l.name, l.detail);
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    println!("acceptance: {passed}/{} criteria pass", lines.len());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
