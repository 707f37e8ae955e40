//! Experiment configuration schemas. Each command has its own JSON document
//! with a `command` discriminator; unknown fields are rejected.

use serde::{Deserialize, Serialize};

use dirtail::bandit::{ArmSpec, BanditAlgo, BoundedArm, PriorKind};
use dirtail::dirichlet::DirichletParams;
use dirtail::{FiniteDist, WeightedSupport};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Fields shared by every command document.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct Common {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct KinfConfig {
    pub command: String,
    pub p: Vec<f64>,
    pub f: Vec<f64>,
    pub mu: Vec<f64>,
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub command: String,
    pub alpha: Vec<f64>,
    pub f: Vec<f64>,
    pub u: Vec<f64>,
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TailConfig {
    pub command: String,
    pub alpha: Vec<f64>,
    pub f: Vec<f64>,
    pub mu: Vec<f64>,
    pub epsilon: f64,
    pub n_samples: u64,
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DpBoundConfig {
    pub command: String,
    /// `hoeffding` or `bernstein`.
    pub kind: String,
    pub n: u64,
    pub gamma: f64,
    pub epsilon: f64,
    pub delta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical_variance: Option<f64>,
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BanditConfig {
    pub command: String,
    /// `mts`, `rmts`, or `rmts-doubling`.
    pub algorithm: String,
    pub arms: Vec<ArmConfig>,
    pub horizon: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_m: Option<usize>,
    pub replications: u32,
    /// `concentrated` or `light` (default).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<String>,
    #[serde(flatten)]
    pub common: Common,
}

/// One arm. `kind` selects the family and decides which fields are required:
/// `multinomial` takes `probs`; `discrete` takes `values` and `probs`;
/// `beta` takes `alpha` and `beta`; `piecewise-uniform` takes `breaks` and
/// `weights`.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ArmConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breaks: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

fn required<T>(field: Option<T>, kind: &str, name: &str) -> Result<T, CliError> {
    field.ok_or_else(|| CliError::config(format!("{kind} arm needs field `{name}`")))
}

fn forbid<T>(field: &Option<T>, kind: &str, name: &str) -> Result<(), CliError> {
    if field.is_some() {
        return Err(CliError::config(format!(
            "{kind} arm does not take field `{name}`"
        )));
    }
    Ok(())
}

impl ArmConfig {
    pub fn to_spec(&self) -> Result<ArmSpec, CliError> {
        match self.kind.as_str() {
            "multinomial" => {
                forbid(&self.values, "multinomial", "values")?;
                forbid(&self.alpha, "multinomial", "alpha")?;
                forbid(&self.beta, "multinomial", "beta")?;
                forbid(&self.breaks, "multinomial", "breaks")?;
                forbid(&self.weights, "multinomial", "weights")?;
                let probs = required(self.probs.clone(), "multinomial", "probs")?;
                Ok(ArmSpec::Multinomial(
                    FiniteDist::new(probs).map_err(CliError::from_config_err)?,
                ))
            }
            "discrete" => {
                forbid(&self.alpha, "discrete", "alpha")?;
                forbid(&self.beta, "discrete", "beta")?;
                forbid(&self.breaks, "discrete", "breaks")?;
                forbid(&self.weights, "discrete", "weights")?;
                Ok(ArmSpec::Bounded(BoundedArm::Discrete {
                    values: required(self.values.clone(), "discrete", "values")?,
                    probs: required(self.probs.clone(), "discrete", "probs")?,
                }))
            }
            "beta" => {
                forbid(&self.probs, "beta", "probs")?;
                forbid(&self.values, "beta", "values")?;
                forbid(&self.breaks, "beta", "breaks")?;
                forbid(&self.weights, "beta", "weights")?;
                Ok(ArmSpec::Bounded(BoundedArm::Beta {
                    alpha: required(self.alpha, "beta", "alpha")?,
                    beta: required(self.beta, "beta", "beta")?,
                }))
            }
            "piecewise-uniform" => {
                forbid(&self.probs, "piecewise-uniform", "probs")?;
                forbid(&self.values, "piecewise-uniform", "values")?;
                forbid(&self.alpha, "piecewise-uniform", "alpha")?;
                forbid(&self.beta, "piecewise-uniform", "beta")?;
                Ok(ArmSpec::Bounded(BoundedArm::PiecewiseUniform {
                    breaks: required(self.breaks.clone(), "piecewise-uniform", "breaks")?,
                    weights: required(self.weights.clone(), "piecewise-uniform", "weights")?,
                }))
            }
            other => Err(CliError::config(format!("unknown arm kind `{other}`"))),
        }
    }
}

impl BanditConfig {
    pub fn algo(&self) -> Result<BanditAlgo, CliError> {
        match self.algorithm.as_str() {
            "mts" => Ok(BanditAlgo::Mts),
            "rmts" => {
                let grid_m = self
                    .grid_m
                    .ok_or_else(|| CliError::config("rmts requires `grid_m`".to_string()))?;
                Ok(BanditAlgo::Rmts { grid_m })
            }
            "rmts-doubling" => Ok(BanditAlgo::RmtsDoubling),
            other => Err(CliError::config(format!("unknown algorithm `{other}`"))),
        }
    }

    pub fn prior_kind(&self) -> Result<PriorKind, CliError> {
        match self.prior.as_deref() {
            None | Some("light") => Ok(PriorKind::Light),
            Some("concentrated") => Ok(PriorKind::Concentrated),
            Some(other) => Err(CliError::config(format!("unknown prior `{other}`"))),
        }
    }
}

/// Reads the `command` discriminator without committing to a schema.
pub fn peek_command(text: &str) -> Result<String, CliError> {
    #[derive(Deserialize)]
    struct Probe {
        command: String,
    }
    let probe: Probe = serde_json::from_str(text)
        .map_err(|e| CliError::config(format!("config must carry a `command` field: {e}")))?;
    Ok(probe.command)
}

pub fn parse_support(values: &[f64]) -> Result<WeightedSupport, CliError> {
    WeightedSupport::new(values.to_vec()).map_err(CliError::from_config_err)
}

pub fn parse_dist(probs: &[f64]) -> Result<FiniteDist, CliError> {
    FiniteDist::new(probs.to_vec()).map_err(CliError::from_config_err)
}

pub fn parse_params(alpha: &[f64]) -> Result<DirichletParams, CliError> {
    DirichletParams::new(alpha.to_vec()).map_err(CliError::from_config_err)
}
