//! Experiment configuration.
//!
//! The config file is TOML restricted to flat keys under a few sections:
//!
//! ```toml
//! name = "adult-sweep"
//! seeds = [0, 1, 2]
//!
//! [data]
//! correlations = [0.3, 0.5, 0.7, 0.9]
//! augmentation = "noise"
//!
//! [model]
//! mu = 1e-7
//!
//! [optim]
//! algorithms = ["normal_gda", "ngd_modified"]
//! threshold = 0.8
//! ```
//!
//! Any key can be overridden with a dotted `section.key=value` pair; the
//! command-line flags are shorthands for such pairs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{Augmentation, Schema};
use crate::error::{Error, Result};
use crate::models::{Adversary, Model};
use crate::optim::{Algorithm, AlphaSchedule, Objective, OptimizerConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Subdirectory of the output root that receives this experiment.
    pub name: String,
    pub output: PathBuf,
    /// One run per seed in every cell.
    pub seeds: Vec<u64>,
    pub data: DataConfig,
    pub model: ModelConfig,
    pub optim: OptimConfig,
    pub alpha_sweep: AlphaSweepConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Base CSV. When absent a census-like population is generated.
    pub base: Option<PathBuf>,
    pub base_samples: usize,
    pub base_seed: u64,
    /// Seed of the relabeling order used to reach each target correlation.
    pub label_seed: u64,
    pub label: String,
    pub label_positive: Option<String>,
    pub sensitive: String,
    pub sensitive_positive: Option<String>,
    pub drop: Vec<String>,
    pub categorical: Vec<String>,
    pub sensitive_as_feature: bool,
    /// Target label/sensitive correlations; empty means the base labels.
    pub correlations: Vec<f64>,
    /// Defaults to `<output>/data`.
    pub cache_dir: Option<PathBuf>,
    pub test_fraction: f64,
    pub augmentation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub adversary: String,
    pub degree: usize,
    pub mu: f64,
    pub ridge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimConfig {
    pub algorithms: Vec<String>,
    pub eta_adversary: f64,
    pub eta_classifier: f64,
    pub iterations: usize,
    pub alpha0: f64,
    pub alpha_power: f64,
    pub threshold: Option<f64>,
    pub objective: String,
    pub smoothness_samples: usize,
    pub smoothness_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaSweepConfig {
    pub powers: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: "experiment".into(),
            output: PathBuf::from("runs"),
            seeds: vec![0],
            data: DataConfig::default(),
            model: ModelConfig::default(),
            optim: OptimConfig::default(),
            alpha_sweep: AlphaSweepConfig::default(),
        }
    }
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            base: None,
            base_samples: 10_000,
            base_seed: 0,
            label_seed: 1,
            label: "income".into(),
            label_positive: None,
            sensitive: "sex".into(),
            sensitive_positive: None,
            drop: Vec::new(),
            categorical: Vec::new(),
            sensitive_as_feature: true,
            correlations: Vec::new(),
            cache_dir: None,
            test_fraction: 0.3,
            augmentation: "bias".into(),
        }
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        let model = Model::default();
        ModelConfig {
            adversary: model.adversary.name().into(),
            degree: model.adversary.degree(),
            mu: model.adversary.mu(),
            ridge: model.ridge,
        }
    }
}

impl Default for OptimConfig {
    fn default() -> Self {
        let o = OptimizerConfig::default();
        OptimConfig {
            algorithms: vec![o.algorithm.name().into()],
            eta_adversary: o.eta_adversary,
            eta_classifier: o.eta_classifier,
            iterations: o.iterations,
            alpha0: o.alpha.alpha0,
            alpha_power: o.alpha.power,
            threshold: o.threshold,
            objective: "joint".into(),
            smoothness_samples: o.smoothness_samples,
            smoothness_radius: o.smoothness_radius,
        }
    }
}

impl Default for AlphaSweepConfig {
    fn default() -> Self {
        AlphaSweepConfig {
            powers: (1..=10).map(|k| f64::from(k) / 10.0).collect(),
        }
    }
}

/// Parses `value` as a TOML value, falling back to a bare string.
fn parse_value(value: &str) -> toml::Value {
    format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()))
}

/// Sets `key` (dotted) in `table`, creating intermediate sections.
pub fn set_key(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|k| !k.is_empty()).ok_or_else(|| Error::Config(format!("empty key `{key}`")))?;
    let mut cur = table;
    for part in parts {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{part}` in `{key}` is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

/// Splits `key=value` and parses the value.
pub fn parse_override(pair: &str) -> Result<(String, toml::Value)> {
    let (key, value) = pair
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{pair}` is not of the form key=value")))?;
    Ok((key.trim().to_string(), parse_value(value.trim())))
}

impl ExperimentConfig {
    /// Reads `path` (if any), applies `overrides` in order and validates.
    pub fn load(path: Option<&Path>, overrides: &[(String, toml::Value)]) -> Result<Self> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                text.parse::<toml::Table>()
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for (key, value) in overrides {
            set_key(&mut table, key, value.clone())?;
        }
        let config: ExperimentConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!("invalid experiment name `{}`", self.name));
        }
        if let Some(c) = self.data.correlations.iter().find(|c| !(**c > 0.0 && **c <= 1.0)) {
            return bad(format!("correlations must lie in (0, 1], got {c}"));
        }
        if !(self.data.test_fraction > 0.0 && self.data.test_fraction < 1.0) {
            return bad(format!("test_fraction must lie in (0, 1), got {}", self.data.test_fraction));
        }
        if self.data.base.is_none() && self.data.base_samples < 10 {
            return bad("base_samples must be at least 10".into());
        }
        self.augmentation()?;
        self.model()?;
        if self.optim.algorithms.is_empty() {
            return bad("at least one algorithm is required".into());
        }
        for alg in self.algorithms()? {
            self.optimizer(alg, self.alpha())?.validate()?;
        }
        if let Some(p) = self.alpha_sweep.powers.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return bad(format!("alpha_sweep powers must lie in [0, 1], got {p}"));
        }
        Ok(())
    }

    pub fn augmentation(&self) -> Result<Augmentation> {
        self.data.augmentation.parse()
    }

    pub fn model(&self) -> Result<Model> {
        let m = &self.model;
        let model = Model::new(Adversary::from_name(&m.adversary, m.degree, m.mu)?, m.ridge);
        model.validate()?;
        Ok(model)
    }

    pub fn algorithms(&self) -> Result<Vec<Algorithm>> {
        self.optim.algorithms.iter().map(|a| a.parse()).collect()
    }

    pub fn alpha(&self) -> AlphaSchedule {
        AlphaSchedule {
            alpha0: self.optim.alpha0,
            power: self.optim.alpha_power,
        }
    }

    pub fn optimizer(&self, algorithm: Algorithm, alpha: AlphaSchedule) -> Result<OptimizerConfig> {
        let o = &self.optim;
        Ok(OptimizerConfig {
            algorithm,
            eta_adversary: o.eta_adversary,
            eta_classifier: o.eta_classifier,
            alpha,
            iterations: o.iterations,
            threshold: o.threshold,
            seed: 0,
            objective: o.objective.parse::<Objective>()?,
            smoothness: None,
            smoothness_samples: o.smoothness_samples,
            smoothness_radius: o.smoothness_radius,
        })
    }

    pub fn schema(&self) -> Schema {
        let d = &self.data;
        Schema {
            label_positive: d.label_positive.clone(),
            sensitive_positive: d.sensitive_positive.clone(),
            drop: d.drop.clone(),
            categorical: d.categorical.clone(),
            sensitive_as_feature: d.sensitive_as_feature,
            ..Schema::new(d.label.clone(), d.sensitive.clone())
        }
    }

    pub fn experiment_dir(&self) -> PathBuf {
        self.output.join(&self.name)
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.data.cache_dir.clone().unwrap_or_else(|| self.output.join("data"))
    }
}
