//! Experiment configuration files.
//!
//! Configs are TOML documents. Unknown keys are rejected, and errors name the
//! offending key path.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::{DiagnosticThresholds, EntropyRoute, SeMethod};
use crate::error::{Error, Result};
use crate::maxent::PExponent;
use crate::predictors::PredictorSpec;
use crate::processes::{ProcessSpec, RecursionSpec};

fn default_seed() -> u64 {
    0
}

fn default_sigmas() -> f64 {
    3.0
}

fn default_history() -> usize {
    4
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Realizations `N` per scenario.
    pub realizations: usize,
    /// Time steps `K` per realization.
    pub steps: usize,
    pub p: Vec<PExponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub thresholds: DiagnosticThresholds,
    #[serde(default)]
    pub standard_error: SeMethod,
    /// A row is a violation when its empirical norm is more than this many
    /// standard errors below the bound.
    #[serde(default = "default_sigmas")]
    pub violation_sigmas: f64,
    #[serde(rename = "scenario")]
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    Prediction(PredictionScenario),
    Recursion(RecursionScenario),
    SideInformation(SideInformationScenario),
}

/// Which steps get a report row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Evaluate {
    Mode(EvaluateMode),
    Steps(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EvaluateMode {
    /// One row pooling every steady-state step.
    #[default]
    Pooled,
    /// One row per step.
    All,
}

impl Default for Evaluate {
    fn default() -> Self {
        Evaluate::Mode(EvaluateMode::Pooled)
    }
}

/// Predictor choice in a config. `oracle` uses the scenario's own process
/// and `fitted` runs Levinson-Durbin on the simulated ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PredictorConfig {
    Zero,
    Constant { value: f64 },
    Linear { coeffs: Vec<f64> },
    Oracle,
    Fitted { order: usize },
}

impl PredictorConfig {
    /// The predictor spec when it does not depend on simulated data.
    pub fn fixed(&self, process: &ProcessSpec) -> Option<PredictorSpec> {
        match self {
            PredictorConfig::Zero => Some(PredictorSpec::Zero),
            PredictorConfig::Constant { value } => Some(PredictorSpec::Constant { value: *value }),
            PredictorConfig::Linear { coeffs } => Some(PredictorSpec::linear(coeffs.clone())),
            PredictorConfig::Oracle => Some(PredictorSpec::Oracle {
                process: process.clone(),
                p: PExponent::Finite(2.0),
            }),
            PredictorConfig::Fitted { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionScenario {
    pub name: String,
    pub process: ProcessSpec,
    pub predictor: PredictorConfig,
    /// Forces an entropy route instead of the most accurate available one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<EntropyRoute>,
    /// Past steps used for conditioning in estimates and diagnostics.
    #[serde(default = "default_history")]
    pub history: usize,
    #[serde(default)]
    pub evaluate: Evaluate,
    #[serde(default = "yes")]
    pub diagnostics: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<PExponent>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecursionScenario {
    pub name: String,
    pub recursion: RecursionSpec,
    #[serde(default = "default_history")]
    pub history: usize,
    #[serde(default)]
    pub evaluate: Evaluate,
    #[serde(default = "yes")]
    pub diagnostics: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<PExponent>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

/// Estimating `x ~ N(0, signal_sigma²)` from `y = x + v`,
/// `v ~ N(0, noise_sigma²)`, with the conditional-mean estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideInformationScenario {
    pub name: String,
    pub signal_sigma: f64,
    pub noise_sigma: f64,
    #[serde(default = "yes")]
    pub diagnostics: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<PExponent>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
}

impl Scenario {
    pub fn name(&self) -> &str {
        match self {
            Scenario::Prediction(s) => &s.name,
            Scenario::Recursion(s) => &s.name,
            Scenario::SideInformation(s) => &s.name,
        }
    }

    pub fn exponents<'a>(&'a self, default: &'a [PExponent]) -> &'a [PExponent] {
        let own = match self {
            Scenario::Prediction(s) => s.p.as_deref(),
            Scenario::Recursion(s) => s.p.as_deref(),
            Scenario::SideInformation(s) => s.p.as_deref(),
        };
        own.unwrap_or(default)
    }

    pub fn realizations(&self, default: usize) -> usize {
        match self {
            Scenario::Prediction(s) => s.realizations,
            Scenario::Recursion(s) => s.realizations,
            Scenario::SideInformation(s) => s.realizations,
        }
        .unwrap_or(default)
    }

    pub fn steps(&self, default: usize) -> usize {
        match self {
            Scenario::Prediction(s) => s.steps.unwrap_or(default),
            Scenario::Recursion(s) => s.steps.unwrap_or(default),
            Scenario::SideInformation(_) => 0,
        }
    }
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| config_error("<document>", e.to_string()))?;
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(path, e.into_inner().message().trim().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    /// Checks constraints the schema cannot express.
    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(config_error("realizations", "must be positive"));
        }
        if self.p.is_empty() {
            return Err(config_error("p", "needs at least one exponent"));
        }
        if self.scenarios.is_empty() {
            return Err(config_error("scenario", "needs at least one scenario"));
        }
        if !(self.violation_sigmas >= 0.0 && self.violation_sigmas.is_finite()) {
            return Err(config_error("violation_sigmas", "must be a non-negative number"));
        }
        let mut names = std::collections::BTreeSet::new();
        for (i, s) in self.scenarios.iter().enumerate() {
            let at = |key: &str| format!("scenario[{i}].{key}");
            if !names.insert(s.name()) {
                return Err(config_error(at("name"), format!("duplicate scenario name `{}`", s.name())));
            }
            if s.name().is_empty() || !s.name().chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return Err(config_error(at("name"), "use letters, digits, `-` and `_` only"));
            }
            if s.realizations(self.realizations) == 0 {
                return Err(config_error(at("realizations"), "must be positive"));
            }
            if s.exponents(&self.p).is_empty() {
                return Err(config_error(at("p"), "needs at least one exponent"));
            }
            let steps = s.steps(self.steps);
            match s {
                Scenario::Prediction(ps) => {
                    ps.process.validate().map_err(|e| config_error(at("process"), e.to_string()))?;
                    check_steps(&ps.evaluate, steps + 1).map_err(|m| config_error(at("evaluate"), m))?;
                    if let PredictorConfig::Fitted { order } = ps.predictor {
                        if order > steps {
                            return Err(config_error(at("predictor.order"), format!("order {order} exceeds {steps} steps")));
                        }
                    }
                }
                Scenario::Recursion(rs) => {
                    if steps == 0 {
                        return Err(config_error(at("steps"), "recursions need at least one step"));
                    }
                    rs.recursion.validate(steps).map_err(|e| config_error(at("recursion"), e.to_string()))?;
                    if rs.recursion.noise.is_none() {
                        return Err(config_error(at("recursion.noise"), "the bound needs a noise density"));
                    }
                    check_steps(&rs.evaluate, steps).map_err(|m| config_error(at("evaluate"), m))?;
                }
                Scenario::SideInformation(si) => {
                    for (key, v) in [("signal_sigma", si.signal_sigma), ("noise_sigma", si.noise_sigma)] {
                        if !(v > 0.0 && v.is_finite()) {
                            return Err(config_error(at(key), "must be positive"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_steps(e: &Evaluate, width: usize) -> std::result::Result<(), String> {
    match e {
        Evaluate::Steps(ks) if ks.is_empty() => Err("list of steps is empty".into()),
        Evaluate::Steps(ks) => match ks.iter().find(|&&k| k >= width) {
            Some(k) => Err(format!("step {k} is out of range (< {width})")),
            None => Ok(()),
        },
        Evaluate::Mode(_) => Ok(()),
    }
}
