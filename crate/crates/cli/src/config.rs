//! JSON run configuration: the same keys as the command-line flags, with
//! underscores. Flags override file values; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub f_min: Option<f64>,
    pub f_max: Option<f64>,
    pub steps: Option<u64>,
    pub rounds: Option<u32>,
    pub eta: Option<f64>,
    pub loss_placement: Option<String>,
    pub f0: Option<f64>,
    pub tau_bounds: Option<Vec<f64>>,
    pub samples: Option<u64>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub policy: Option<String>,
    pub sigma: Option<f64>,
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }
}

/// Flag value if given, else file value, else the built-in default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

pub fn pick_opt<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}
