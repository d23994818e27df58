//! Batch experiment runner for `hyperdeform`: one subcommand per experiment,
//! configured by a TOML file, writing CSV tables, SVG plots and a pass/fail
//! summary.

pub mod config;
pub mod experiments;
pub mod output;
pub mod svg;

use std::path::{Path, PathBuf};

use config::{ConfigError, Experiment, ExperimentConfig};
use output::Outcome;

/// Exit status of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Passed = 0,
    Failed = 1,
    ConfigError = 2,
    ComputeError = 3,
}

/// Loads the configuration and applies command-line overrides.
pub fn prepare(
    experiment: Experiment,
    config: Option<&Path>,
    out: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<(ExperimentConfig, PathBuf), ConfigError> {
    let mut cfg = match config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if seed.is_some() {
        cfg.sampler.seed = seed;
    }
    cfg.validate(experiment)?;
    let dir = out.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out").join(experiment.name()));
    Ok((cfg, dir))
}

/// Runs one experiment and writes its artifacts into `dir`.
pub fn execute(experiment: Experiment, cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome, String> {
    let outcome = experiments::run(experiment, cfg).map_err(|e| format!("experiment {experiment}: {e}"))?;
    output::write_outcome(dir, experiment.name(), &cfg.tolerances.budget(), &outcome)
        .map_err(|e| format!("writing {}: {e}", dir.display()))?;
    Ok(outcome)
}
