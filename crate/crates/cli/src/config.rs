//! Experiment configuration: a JSON file whose keys can be overridden by
//! command-line flags of the same name.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

pub const SEED_ENV: &str = "STABCLEANSE_SEED";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: Option<usize>,
    pub t: Option<usize>,
    pub t_density: Option<f64>,
    pub f_density: Option<f64>,
    pub n_f: Option<usize>,
    pub n_e: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub grid: Option<Vec<f64>>,
    pub t_min: Option<usize>,
    pub t_max: Option<usize>,
    pub mode: Option<String>,
    pub state: Option<String>,
    pub circuit: Option<PathBuf>,
    pub sidecar: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub count: Option<usize>,
    pub shots: Option<u64>,
    pub reps: Option<usize>,
    pub epsilon: Option<f64>,
    pub epsilons: Option<Vec<f64>>,
    pub n_list: Option<Vec<usize>>,
    pub table_path: Option<PathBuf>,
}

/// Reads `path` (if any) and overlays the non-null keys of `overrides`.
pub fn load(path: Option<&Path>, overrides: &Value) -> Result<ExperimentConfig, CliError> {
    let mut base = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str::<Value>(&text)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?
        }
        None => Value::Object(Map::new()),
    };
    let Value::Object(obj) = &mut base else {
        return Err(CliError::Usage("config must be a JSON object".into()));
    };
    if let Value::Object(o) = overrides {
        for (k, v) in o {
            if !v.is_null() {
                obj.insert(k.clone(), v.clone());
            }
        }
    }
    serde_json::from_value(base).map_err(|e| CliError::Usage(format!("config: {e}")))
}

impl ExperimentConfig {
    /// Flag or config key first, then the environment.
    pub fn require_seed(&self) -> Result<u64, CliError> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
            Err(_) => Err(CliError::Usage(format!(
                "a seed is required: pass --seed, set \"seed\" in the config, or set {SEED_ENV}"
            ))),
        }
    }

    pub fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    /// `t` directly, or `n·t_density` when that is an integer.
    pub fn t_or(&self, n: usize, default: usize) -> Result<usize, CliError> {
        match (self.t, self.t_density) {
            (Some(t), _) => Ok(t),
            (None, Some(d)) => integral(n as f64 * d, "n·t_density"),
            (None, None) => Ok(default),
        }
    }

    /// `n_f` directly, or `n·f_density` when that is an integer.
    pub fn n_f_or(&self, n: usize, default: usize) -> Result<usize, CliError> {
        match (self.n_f, self.f_density) {
            (Some(k), _) => Ok(k),
            (None, Some(f)) => integral(n as f64 * f, "n·f_density"),
            (None, None) => Ok(default),
        }
    }
}

fn integral(x: f64, what: &str) -> Result<usize, CliError> {
    if x < 0.0 || (x - x.round()).abs() > 1e-9 {
        return Err(CliError::Usage(format!("{what} = {x} is not a nonnegative integer")));
    }
    Ok(x.round() as usize)
}
