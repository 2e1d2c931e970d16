//! Flat `key = value` checkpoint records.
//!
//! ```text
//! n = 8
//! d = 2
//! adversary = statistical_parity
//! mu = 1
//! ridge = 1
//! augmentation = bias
//! noise_seed = 0
//! w = 0.25 -1.5 ...
//! u = ...
//! ```
//!
//! Floats use Rust's shortest round-trip formatting, so reading a checkpoint
//! back yields bit-identical parameters.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{Adversary, Model, ModelParams, DEFAULT_RIDGE};
use crate::dataset::Augmentation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    /// Raw feature count; `w` has `n + 1` entries.
    pub n: usize,
    pub model: Model,
    pub augmentation: Augmentation,
    pub noise_seed: u64,
    pub params: ModelParams,
}

impl Checkpoint {
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        let _ = writeln!(out, "n = {}", self.n);
        let adversary = &self.model.adversary;
        let _ = writeln!(out, "d = {}", adversary.degree());
        let _ = writeln!(out, "adversary = {}", adversary.name());
        let _ = writeln!(out, "mu = {}", adversary.mu());
        let _ = writeln!(out, "ridge = {}", self.model.ridge);
        let _ = writeln!(out, "augmentation = {}", self.augmentation);
        let _ = writeln!(out, "noise_seed = {}", self.noise_seed);
        let _ = writeln!(out, "w = {}", join(&self.params.w));
        let _ = writeln!(out, "u = {}", join(&self.params.u));
        out
    }

    pub fn from_text(text: &str, path: &Path) -> Result<Self> {
        let bad = |message: String| Error::Format {
            kind: "checkpoint",
            path: path.to_path_buf(),
            message,
        };
        let mut fields = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected `key = value`, found `{line}`")))?;
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |key: &str| fields.get(key).ok_or_else(|| bad(format!("missing `{key}`")));
        let number = |key: &str| -> Result<f64> {
            get(key)?.parse().map_err(|_| bad(format!("`{key}` is not a number")))
        };
        let integer = |key: &str| -> Result<u64> {
            get(key)?.parse().map_err(|_| bad(format!("`{key}` is not an integer")))
        };
        let vector = |key: &str| -> Result<Vec<f64>> {
            get(key)?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(format!("bad entry `{t}` in `{key}`"))))
                .collect()
        };

        let n = integer("n")? as usize;
        let adversary = Adversary::from_name(get("adversary")?, integer("d")? as usize, number("mu")?)
            .map_err(|e| bad(e.to_string()))?;
        let ridge = if fields.contains_key("ridge") { number("ridge")? } else { DEFAULT_RIDGE };
        let model = Model::new(adversary, ridge);
        model.validate().map_err(|e| bad(e.to_string()))?;
        let augmentation = match fields.get("augmentation") {
            Some(a) => a.parse().map_err(|e: Error| bad(e.to_string()))?,
            None => Augmentation::Bias,
        };
        let noise_seed = if fields.contains_key("noise_seed") { integer("noise_seed")? } else { 0 };
        let params = ModelParams {
            w: vector("w")?,
            u: vector("u")?,
        };
        if params.w.len() != n + 1 {
            return Err(bad(format!("w has {} entries, expected {}", params.w.len(), n + 1)));
        }
        if params.u.len() != adversary.param_dim() {
            return Err(bad(format!(
                "u has {} entries, expected {}",
                params.u.len(),
                adversary.param_dim()
            )));
        }
        Ok(Checkpoint {
            n,
            model,
            augmentation,
            noise_seed,
            params,
        })
    }
}

pub fn write_checkpoint(checkpoint: &Checkpoint, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, checkpoint.to_text()).map_err(|e| Error::io(path, e))
}

pub fn read_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Checkpoint::from_text(&text, path)
}
