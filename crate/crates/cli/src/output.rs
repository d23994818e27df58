//! Artifacts of one run: tables, plots and the pass/fail summary.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::svg::Chart;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported but not assertion-bearing.
    Info,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable condition, e.g. `<= 1e-6`.
    pub condition: String,
    pub verdict: Verdict,
}

impl Check {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Check::cond(name, value, format!("<= {bound:e}"), value <= bound)
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Check::cond(name, value, format!(">= {bound:e}"), value >= bound)
    }

    pub fn cond(name: &str, value: f64, condition: String, ok: bool) -> Self {
        Check { name: name.into(), value, condition, verdict: if ok { Verdict::Pass } else { Verdict::Fail } }
    }

    pub fn info(name: &str, value: f64, note: &str) -> Self {
        Check { name: name.into(), value, condition: note.into(), verdict: Verdict::Info }
    }

    pub fn line(&self) -> String {
        let tag = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "INFO",
        };
        format!("{tag} {}: {:.6e} ({})", self.name, self.value, self.condition)
    }
}

/// Everything an experiment produces before it is written to disk.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    /// Main table without header comments.
    pub report: String,
    /// Convergence histories.
    pub history: String,
    /// Further tables, `(file name, csv)`.
    pub extra: Vec<(String, String)>,
    /// `(suffix, chart)` written as `plot_<suffix>.svg`.
    pub plots: Vec<(String, Chart)>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn summary(&self, experiment: &str) -> String {
        let mut out = format!("experiment {experiment}\n");
        for c in &self.checks {
            out.push_str(&c.line());
            out.push('\n');
        }
        let _ = writeln!(out, "{}", if self.passed() { "RESULT PASS" } else { "RESULT FAIL" });
        out
    }
}

/// Header comment lines: a timestamp line, the experiment and the budget.
pub fn header(experiment: &str, budget: &str) -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!("# generated unix={secs}\n# experiment {experiment}\n# tolerances {budget}\n")
}

/// Drops the timestamp line so two runs can be compared.
pub fn strip_timestamp(csv: &str) -> String {
    csv.lines().filter(|l| !l.starts_with("# generated")).map(|l| format!("{l}\n")).collect()
}

pub fn write_outcome(dir: &Path, experiment: &str, budget: &str, outcome: &Outcome) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let head = header(experiment, budget);
    std::fs::write(dir.join("report.csv"), format!("{head}{}", outcome.report))?;
    std::fs::write(dir.join("history.csv"), format!("{head}{}", outcome.history))?;
    for (name, csv) in &outcome.extra {
        std::fs::write(dir.join(name), format!("{head}{csv}"))?;
    }
    for (suffix, chart) in &outcome.plots {
        std::fs::write(dir.join(format!("plot_{suffix}.svg")), chart.render())?;
    }
    std::fs::write(dir.join("summary.txt"), outcome.summary(experiment))
}
