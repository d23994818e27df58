use std::path::Path;
use std::process::{Command, Output};

fn hyperdeform(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperdeform")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn list_names_every_experiment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hyperdeform(&["--list"], tmp.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for e in ["curvature", "moebius", "schwarzian", "raytransform", "kernel", "decompose", "variation", "pipeline", "volume"] {
        assert!(text.contains(e), "{e} missing from --list");
    }
}

#[test]
fn passing_run_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hyperdeform(&["curvature", "--out", "c"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let dir = tmp.path().join("c");
    for f in ["report.csv", "history.csv", "summary.txt", "plot_profile.svg"] {
        assert!(dir.join(f).exists(), "{f} not written");
    }
    let report = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    let mut lines = report.lines();
    assert!(lines.next().unwrap().starts_with("# generated unix="));
    assert_eq!(lines.next().unwrap(), "# experiment curvature");
    assert!(lines.next().unwrap().starts_with("# tolerances "));
    let summary = std::fs::read_to_string(dir.join("summary.txt")).unwrap();
    assert!(summary.trim_end().ends_with("RESULT PASS"));
}

#[test]
fn hypothesis_violation_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "hot.toml", "[deformation]\nfamily = \"conformal\"\neps = 2.0\n");
    let out = hyperdeform(&["curvature", "--config", &cfg, "--out", "hot"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL") && text.contains("curvature bound violated"), "{text}");
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad_key = write(tmp.path(), "bad.toml", "[deformation]\nepsilon = 0.1\n");
    let out = hyperdeform(&["curvature", "--config", &bad_key], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));

    let out = hyperdeform(&["schwarzian", "--out", "s"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));

    let negative = write(tmp.path(), "neg.toml", "[tolerances]\nkernel = -1e-6\n");
    let out = hyperdeform(&["curvature", "--config", &negative], tmp.path());
    assert_eq!(out.status.code(), Some(2));

    let mismatch = write(tmp.path(), "mm.toml", "experiment = \"volume\"\n");
    let out = hyperdeform(&["curvature", "--config", &mismatch], tmp.path());
    assert_eq!(out.status.code(), Some(2));

    let out = hyperdeform(&["curvature", "--config", "missing.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_flag_satisfies_sampled_experiments() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg =
        write(tmp.path(), "small.toml", "[deformation]\nfamily = \"pullback\"\n[sampler]\nquadruples_near = 3\nquadruples_spread = 3\n");
    let out = hyperdeform(&["moebius", "--config", &cfg, "--seed", "4", "--out", "m"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report = std::fs::read_to_string(tmp.path().join("m/report.csv")).unwrap();
    // three header comments, a column header and six quadruples
    assert_eq!(report.lines().count(), 10, "{report}");
}
