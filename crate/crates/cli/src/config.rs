//! Key-value defaults read from a TOML file. Command-line flags override them.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;
use zetacast_core::data::SchemaConfig;

/// Every key is optional; unknown keys are rejected so typos surface early.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<String>,
    pub seed: Option<u64>,
    /// Macro CSV, or `fixture:<name>`.
    pub input: Option<String>,
    /// Generic numeric table, or `fixture:<name>`.
    pub table: Option<String>,
    pub beta: Option<f64>,
    pub index: Option<String>,
    pub alpha: Option<f64>,
    pub alpha_grid: Option<Vec<f64>>,
    /// `window` or a number.
    pub zeta_mean: Option<String>,
    pub signal_mode: Option<String>,
    pub signal_column: Option<String>,
    pub baseline_column: Option<String>,
    pub actual_column: Option<String>,
    pub hmm_model: Option<String>,
    pub arima: Option<String>,
    pub horizon: Option<usize>,
    pub holdout: Option<usize>,
    pub shock_std: Option<f64>,
    pub iterations: Option<usize>,
    pub window: Option<String>,
    pub peaks: Option<usize>,
    pub method: Option<String>,
    pub pairwise: Option<String>,
    pub schema: Option<SchemaConfig>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}
