//! Experiment configuration: a TOML file with a few flat sections.
//!
//! ```toml
//! experiment = "schwarzian"   # optional, must match the subcommand
//! output = "out/schwarzian"   # optional, overridden by --out
//!
//! [deformation]
//! family = "conformal"        # constant | conformal | anisotropic | pullback
//! eps = 0.05
//! r0 = 0.5
//! t = 1.0
//!
//! [sampler]
//! seed = 7
//! pairs = 20
//!
//! [tolerances]
//! cross_method = 1e-3
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use hyperdeform::fields::{AnisotropicBump, Bump, ConformalBump, Twist};
use hyperdeform::{MetricFamily, SymTensorField};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("`{key}` must be positive (got {value})")]
    NotPositive { key: String, value: f64 },
    #[error("`{key}` is invalid: {reason}")]
    Invalid { key: String, reason: String },
    #[error("experiment `{0}` samples randomly and needs `sampler.seed` or --seed")]
    MissingSeed(Experiment),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Curvature,
    Moebius,
    Schwarzian,
    Raytransform,
    Kernel,
    Decompose,
    Variation,
    Pipeline,
    Volume,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Curvature,
        Experiment::Moebius,
        Experiment::Schwarzian,
        Experiment::Raytransform,
        Experiment::Kernel,
        Experiment::Decompose,
        Experiment::Variation,
        Experiment::Pipeline,
        Experiment::Volume,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Curvature => "curvature",
            Experiment::Moebius => "moebius",
            Experiment::Schwarzian => "schwarzian",
            Experiment::Raytransform => "raytransform",
            Experiment::Kernel => "kernel",
            Experiment::Decompose => "decompose",
            Experiment::Variation => "variation",
            Experiment::Pipeline => "pipeline",
            Experiment::Volume => "volume",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Experiment::Curvature => "curvature sweep of g_t and the K <= 0 gate",
            Experiment::Moebius => "cross-ratio deviation of the boundary identity",
            Experiment::Schwarzian => "Schwarzian by limit and by derivatives, distance-gap bound",
            Experiment::Raytransform => "ray transform of g - g0 against twice the Schwarzian, chord sinogram",
            Experiment::Kernel => "ray transform of potential tensors d^g v",
            Experiment::Decompose => "solenoidal decomposition on M, grid floor and adjointness",
            Experiment::Variation => "first variation of distance and Schwarzian along the family",
            Experiment::Pipeline => "reconstruction of the trivializing isotopy",
            Experiment::Volume => "volume estimate on small volume-nonincreasing fields",
        }
    }

    pub fn is_sampled(self) -> bool {
        !matches!(self, Experiment::Curvature | Experiment::Decompose | Experiment::Volume)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyName {
    Constant,
    Conformal,
    Anisotropic,
    Pullback,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Deformation {
    pub family: FamilyName,
    /// Amplitude of the conformal/anisotropic bump.
    pub eps: f64,
    /// Support radius.
    pub r0: f64,
    /// Orientation of the anisotropic bump.
    pub angle: f64,
    /// Twist amplitude of the pullback family.
    pub alpha: f64,
    /// Family time used by single-metric experiments.
    pub t: f64,
}

impl Default for Deformation {
    fn default() -> Self {
        Deformation { family: FamilyName::Conformal, eps: 0.05, r0: 0.5, angle: 0.0, alpha: 0.5, t: 1.0 }
    }
}

impl Deformation {
    pub fn family(&self) -> MetricFamily {
        let bump = Bump::centered(self.r0);
        match self.family {
            FamilyName::Constant => MetricFamily::constant(),
            FamilyName::Conformal => MetricFamily::linear(SymTensorField::analytic(ConformalBump { eps: self.eps, bump })),
            FamilyName::Anisotropic => {
                MetricFamily::linear(SymTensorField::analytic(AnisotropicBump { eps: self.eps, bump, angle: self.angle }))
            }
            FamilyName::Pullback => MetricFamily::pullback(Twist { alpha: self.alpha, r0: self.r0 }),
        }
    }

    /// Whether the boundary map of the family is Moebius by construction.
    pub fn is_trivial(&self) -> bool {
        match self.family {
            FamilyName::Constant | FamilyName::Pullback => true,
            FamilyName::Conformal | FamilyName::Anisotropic => self.eps == 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sampler {
    pub seed: Option<u64>,
    /// Boundary pairs for Schwarzian, ray-transform and variation scans.
    pub pairs: usize,
    /// Point pairs for the distance-gap scan.
    pub points: usize,
    /// Point pairs for the distance variation.
    pub distance_pairs: usize,
    /// Near and spread quadruples for cross ratios.
    pub quadruples_near: usize,
    pub quadruples_spread: usize,
    /// Rays for kernel checks.
    pub rays: usize,
    /// Random 1-forms for kernel checks.
    pub forms: usize,
    /// Entry-sphere sampler: boundary angles × directions.
    pub entry_angles: usize,
    pub entry_directions: usize,
    pub t_grid: Vec<f64>,
    /// Curvature scan radii.
    pub curvature_resolution: usize,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler {
            seed: None,
            pairs: 20,
            points: 200,
            distance_pairs: 10,
            quadruples_near: 10,
            quadruples_spread: 10,
            rays: 50,
            forms: 3,
            entry_angles: 32,
            entry_directions: 16,
            t_grid: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            curvature_resolution: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    /// Radius of the disk `M` carrying the decomposition.
    pub radius: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { radius: 0.7, n_r: 64, n_theta: 128 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub moebius: f64,
    pub schwarzian: f64,
    pub cross_method: f64,
    pub slack: f64,
    pub kernel: f64,
    pub variation: f64,
    pub distance_variation: f64,
    pub order: f64,
    pub dt: f64,
    pub floor_factor: f64,
    pub volume_cap: f64,
    pub detection_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            moebius: 1e-5,
            schwarzian: 1e-6,
            cross_method: 1e-3,
            slack: 1e-4,
            kernel: 1e-6,
            variation: 1e-3,
            distance_variation: 1e-4,
            order: 1.8,
            dt: 1e-3,
            floor_factor: 10.0,
            volume_cap: 1e-2,
            detection_factor: 10.0,
        }
    }
}

impl Tolerances {
    pub fn entries(&self) -> [(&'static str, f64); 12] {
        [
            ("moebius", self.moebius),
            ("schwarzian", self.schwarzian),
            ("cross_method", self.cross_method),
            ("slack", self.slack),
            ("kernel", self.kernel),
            ("variation", self.variation),
            ("distance_variation", self.distance_variation),
            ("order", self.order),
            ("dt", self.dt),
            ("floor_factor", self.floor_factor),
            ("volume_cap", self.volume_cap),
            ("detection_factor", self.detection_factor),
        ]
    }

    /// One-line `key=value` list for table headers.
    pub fn budget(&self) -> String {
        self.entries().iter().map(|(k, v)| format!("{k}={v:e}")).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub output: Option<PathBuf>,
    pub deformation: Deformation,
    pub sampler: Sampler,
    pub grid: Grid,
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        Self::parse(&text)
    }

    /// Checks the configuration for `experiment`.
    pub fn validate(&self, experiment: Experiment) -> Result<(), ConfigError> {
        if let Some(e) = self.experiment {
            if e != experiment {
                return Err(ConfigError::Invalid {
                    key: "experiment".into(),
                    reason: format!("config is for `{e}` but `{experiment}` was requested"),
                });
            }
        }
        for (key, value) in self.tolerances.entries() {
            if value.is_nan() || value <= 0.0 {
                return Err(ConfigError::NotPositive { key: format!("tolerances.{key}"), value });
            }
        }
        let d = &self.deformation;
        for (key, value) in [("deformation.r0", d.r0), ("grid.radius", self.grid.radius)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(ConfigError::Invalid { key: key.into(), reason: format!("{value} is not in (0, 1)") });
            }
        }
        if d.r0 >= self.grid.radius {
            return Err(ConfigError::Invalid {
                key: "grid.radius".into(),
                reason: format!("the disk must contain the support radius {}", d.r0),
            });
        }
        if !(d.eps.is_finite() && d.alpha.is_finite() && d.t.is_finite() && d.angle.is_finite()) {
            return Err(ConfigError::Invalid { key: "deformation".into(), reason: "non-finite parameter".into() });
        }
        let s = &self.sampler;
        if s.t_grid.len() < 2 || s.t_grid[0] != 0.0 || s.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::Invalid { key: "sampler.t_grid".into(), reason: "must start at 0 and increase".into() });
        }
        if self.grid.n_r < 8 || self.grid.n_theta < 8 || self.grid.n_theta % 2 == 1 {
            return Err(ConfigError::Invalid { key: "grid".into(), reason: "need n_r >= 8 and even n_theta >= 8".into() });
        }
        if experiment.is_sampled() && s.seed.is_none() {
            return Err(ConfigError::MissingSeed(experiment));
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.sampler.seed.unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::parse("[deformation]\nepsilon = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("epsilon"), "{err}");
    }

    #[test]
    fn seed_required_for_sampled_experiments() {
        let c = ExperimentConfig::parse("[deformation]\nfamily = \"pullback\"\n").unwrap();
        assert!(matches!(c.validate(Experiment::Schwarzian), Err(ConfigError::MissingSeed(_))));
        assert!(c.validate(Experiment::Curvature).is_ok());
    }

    #[test]
    fn tolerances_must_be_positive() {
        let c = ExperimentConfig::parse("[sampler]\nseed = 1\n[tolerances]\nkernel = 0.0\n").unwrap();
        let err = c.validate(Experiment::Kernel).unwrap_err();
        assert!(err.to_string().contains("tolerances.kernel"));
    }

    #[test]
    fn experiment_key_must_match() {
        let c = ExperimentConfig::parse("experiment = \"volume\"\n").unwrap();
        assert!(c.validate(Experiment::Curvature).is_err());
        assert!(c.validate(Experiment::Volume).is_ok());
    }
}
