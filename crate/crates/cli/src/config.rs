use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

/// Flat key/value run configuration. Every key is optional; command-line
/// flags win over file values, which win over built-in defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub vc_table: Option<PathBuf>,
    pub delta_table: Option<PathBuf>,
    pub qtable: Option<PathBuf>,

    pub scene_preset: Option<String>,
    pub scene_frames_per_interval: Option<usize>,
    pub scene_noise_sigma: Option<f64>,

    pub delta_step: Option<f64>,
    pub upper_grid: Option<String>,
    pub sweep_grid: Option<String>,

    pub estimator: Option<String>,
    pub policy: Option<String>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub eval_epsilon: Option<f64>,
    pub train_passes: Option<usize>,
    pub ticks_per_interval: Option<usize>,
    pub frames_per_interval: Option<usize>,
    pub source_time: Option<String>,
    pub knobs: Option<Vec<String>>,
    pub knob_steps: Option<[f64; 4]>,

    pub response_peak: Option<[f64; 4]>,
    pub response_width: Option<[f64; 4]>,
    pub proxy_ideal: Option<[f64; 4]>,
    pub proxy_weights: Option<[f64; 4]>,
    pub external_program: Option<String>,
    pub external_args: Option<Vec<String>>,
    pub external_addr: Option<String>,
    pub estimator_timeout_ms: Option<u64>,
    pub max_label: Option<u32>,

    pub camera_set_url: Option<String>,
    pub camera_set_method: Option<String>,
    pub camera_get_url: Option<String>,
    pub camera_capture_url: Option<String>,
    pub camera_timeout_ms: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

/// Fails with a config error unless `path` exists.
pub fn existing(path: PathBuf, what: &str) -> Result<PathBuf, CliError> {
    if path.exists() {
        Ok(path)
    } else {
        Err(CliError::Config(format!("{what} `{}` does not exist", path.display())))
    }
}
