//! Experiment configuration: a strict TOML schema with documented defaults.
//! Unknown keys are rejected so a typo cannot silently fall back to a
//! default.

use std::path::PathBuf;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use rcmlab_core::env::EnvironmentSpec;

/// Environment variable consulted for the default worker count.
pub const THREADS_ENV_VAR: &str = "RCMLAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Correctors,
    Scales,
    Sensitivity,
    CltScan,
    Growth,
    Green,
    Meyers,
    SpectralGap,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Correctors => "correctors",
            ExperimentKind::Scales => "scales",
            ExperimentKind::Sensitivity => "sensitivity",
            ExperimentKind::CltScan => "clt-scan",
            ExperimentKind::Growth => "growth",
            ExperimentKind::Green => "green",
            ExperimentKind::Meyers => "meyers",
            ExperimentKind::SpectralGap => "spectral-gap",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    pub output_dir: PathBuf,
    /// Worker threads; default comes from `RCMLAB_THREADS`, else 1.
    #[serde(default)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    /// Relative residual tolerance of ensemble solves (default 1e-6).
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    1e-6
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection { tol: default_tol() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    /// Number of independent environment samples (default 100).
    #[serde(default = "default_samples")]
    pub n_samples: usize,
}

fn default_samples() -> usize {
    100
}

impl Default for EnsembleSection {
    fn default() -> Self {
        EnsembleSection {
            n_samples: default_samples(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CltSection {
    pub radii: Vec<f64>,
    #[serde(default)]
    pub direction: usize,
    #[serde(default = "default_p_list")]
    pub p_list: Vec<f64>,
    #[serde(default)]
    pub include_sigma: bool,
    #[serde(default = "default_guard")]
    pub guard_ratio: f64,
}

fn default_p_list() -> Vec<f64> {
    vec![1.0, 2.0]
}

fn default_guard() -> f64 {
    8.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSection {
    /// Lattice distances from the origin along the first axis.
    pub offsets: Vec<i64>,
    #[serde(default)]
    pub direction: usize,
    #[serde(default = "default_growth_p")]
    pub p: f64,
    #[serde(default = "default_guard")]
    pub guard_ratio: f64,
}

fn default_growth_p() -> f64 {
    2.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalesSection {
    /// Energy-scale constant; must exceed the realized finiteness threshold.
    #[serde(default = "default_c_spade")]
    pub c_spade: f64,
    /// How many ensemble members get full scale fields (default 8).
    #[serde(default = "default_scale_samples")]
    pub field_samples: usize,
}

fn default_c_spade() -> f64 {
    4.0
}

fn default_scale_samples() -> usize {
    8
}

impl Default for ScalesSection {
    fn default() -> Self {
        ScalesSection {
            c_spade: default_c_spade(),
            field_samples: default_scale_samples(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivitySection {
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Which identity to exercise: "f1", "f2", or "both".
    #[serde(default = "default_check")]
    pub check: String,
}

fn default_trials() -> usize {
    20
}

fn default_check() -> String {
    "both".into()
}

impl Default for SensitivitySection {
    fn default() -> Self {
        SensitivitySection {
            trials: default_trials(),
            check: default_check(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenSection {
    /// Offsets |x| along the first axis.
    pub offsets: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralGapSection {
    /// "exhaustive" or "monte-carlo".
    #[serde(default = "default_sg_mode")]
    pub mode: String,
    /// Observable: "single-edge" or "f1".
    #[serde(default = "default_sg_obs")]
    pub observable: String,
    #[serde(default)]
    pub edge: usize,
}

fn default_sg_mode() -> String {
    "exhaustive".into()
}

fn default_sg_obs() -> String {
    "f1".into()
}

impl Default for SpectralGapSection {
    fn default() -> Self {
        SpectralGapSection {
            mode: default_sg_mode(),
            observable: default_sg_obs(),
            edge: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrectorsSection {
    #[serde(default)]
    pub directions: Vec<usize>,
    /// Massive-corrector parameters to sweep (optional).
    #[serde(default)]
    pub massive_t: Vec<f64>,
}

impl Default for CorrectorsSection {
    fn default() -> Self {
        CorrectorsSection {
            directions: vec![0],
            massive_t: Vec::new(),
        }
    }
}

/// The full experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub env: EnvironmentSpec,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub clt: Option<CltSection>,
    #[serde(default)]
    pub growth: Option<GrowthSection>,
    #[serde(default)]
    pub scales: Option<ScalesSection>,
    #[serde(default)]
    pub sensitivity: Option<SensitivitySection>,
    #[serde(default)]
    pub green: Option<GreenSection>,
    #[serde(default)]
    pub spectral_gap: Option<SpectralGapSection>,
    #[serde(default)]
    pub correctors: Option<CorrectorsSection>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).context("config does not match the schema")?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.env
            .validate()
            .map_err(|e| anyhow::anyhow!("invalid [env]: {e}"))?;
        if !(self.solver.tol > 0.0 && self.solver.tol < 1.0) {
            bail!("solver.tol = {} must lie in (0,1)", self.solver.tol);
        }
        if self.ensemble.n_samples == 0 {
            bail!("ensemble.n_samples must be positive");
        }
        match self.experiment.kind {
            ExperimentKind::CltScan if self.clt.is_none() => {
                bail!("clt-scan experiment needs a [clt] section")
            }
            ExperimentKind::Growth if self.growth.is_none() => {
                bail!("growth experiment needs a [growth] section")
            }
            ExperimentKind::Green if self.green.is_none() => {
                bail!("green experiment needs a [green] section")
            }
            _ => {}
        }
        if let Some(sg) = &self.spectral_gap {
            if !["exhaustive", "monte-carlo"].contains(&sg.mode.as_str()) {
                bail!("spectral_gap.mode must be \"exhaustive\" or \"monte-carlo\"");
            }
            if !["single-edge", "f1"].contains(&sg.observable.as_str()) {
                bail!("spectral_gap.observable must be \"single-edge\" or \"f1\"");
            }
        }
        if let Some(s) = &self.sensitivity {
            if !["f1", "f2", "both"].contains(&s.check.as_str()) {
                bail!("sensitivity.check must be \"f1\", \"f2\" or \"both\"");
            }
        }
        Ok(())
    }

    /// Worker count: explicit config, else `RCMLAB_THREADS`, else 1.
    pub fn threads(&self) -> usize {
        if let Some(t) = self.experiment.threads {
            return t.max(1);
        }
        std::env::var(THREADS_ENV_VAR)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .unwrap_or(1)
            .max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[experiment]
kind = "clt-scan"
output_dir = "out"

[env]
dimension = 2
box_side = 32
seed = 7

[env.distribution]
kind = "uniform"
lambda = 0.5

[clt]
radii = [2.0, 4.0]
"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let config = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(config.experiment.kind, ExperimentKind::CltScan);
        assert_eq!(config.solver.tol, 1e-6);
        assert_eq!(config.ensemble.n_samples, 100);
        assert_eq!(config.clt.unwrap().p_list, vec![1.0, 2.0]);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = MINIMAL.replace("[clt]", "[clt]\nturbo = true");
        let err = ExperimentConfig::parse(&bad).unwrap_err();
        assert!(format!("{err:#}").contains("turbo"), "{err:#}");
    }

    #[test]
    fn type_errors_name_the_key() {
        let bad = MINIMAL.replace("seed = 7", "seed = \"seven\"");
        let err = ExperimentConfig::parse(&bad).unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("seed") || msg.contains("integer"), "{msg}");
    }

    #[test]
    fn missing_section_for_kind() {
        let bad = MINIMAL.replace("[clt]\nradii = [2.0, 4.0]\n", "");
        let err = ExperimentConfig::parse(&bad).unwrap_err();
        assert!(format!("{err:#}").contains("[clt]"));
    }
}
