//! Experiment configuration: one JSON file drives the whole workflow.
//!
//! Every field has a default, so `{}` is a valid file and
//! `--print-default-config` shows the fully populated baseline. Unknown keys
//! are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vtfit_core::{
    BenchConfig, GramSchmidtMode, NmseNormalization, OracleParams, ParameterRanges, WaveformKind,
};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub oracle: OracleParams,
    pub ranges: ParameterRanges,
    pub training: TrainingConfig,
    pub test_signals: Vec<SignalConfig>,
    /// Grid levels per geometric input in test sequences.
    pub sweep_points: usize,
    pub solver: SolverConfig,
    pub metrics: MetricsConfig,
    pub bench: BenchConfig,
    /// Directory all outputs are written into.
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingConfig {
    /// Number of random training samples.
    pub n: usize,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self { n: 5_000, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    /// File stem of the generated CSV and report label.
    pub name: String,
    pub kind: WaveformKind,
    /// Sequence length.
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub mode: GramSchmidtMode,
    pub include_bias: bool,
    /// Map inputs onto [-1, 1] from the configured ranges before expansion.
    pub scale_inputs: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mode: GramSchmidtMode::Modified,
            include_bias: true,
            scale_inputs: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    pub nmse_normalization: NmseNormalization,
    pub histogram_bins: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            nmse_normalization: NmseNormalization::Energy,
            histogram_bins: 30,
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            oracle: OracleParams::default(),
            ranges: ParameterRanges::default(),
            training: TrainingConfig::default(),
            test_signals: vec![
                SignalConfig {
                    name: "chirp".into(),
                    kind: WaveformKind::Chirp { f0: 1.0, f1: 40.0 },
                    n: 2_000,
                },
                SignalConfig {
                    name: "sinusoidal".into(),
                    kind: WaveformKind::Sinusoidal {
                        frequency: 10.0,
                        phase: 0.0,
                    },
                    n: 2_000,
                },
                SignalConfig {
                    name: "q_triangular".into(),
                    kind: WaveformKind::QTriangular { period: 200 },
                    n: 2_000,
                },
            ],
            sweep_points: 3,
            solver: SolverConfig::default(),
            metrics: MetricsConfig::default(),
            bench: BenchConfig::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    /// Loads and validates a configuration file, or the defaults when no
    /// path is given.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let config = match path {
            None => ExperimentConfig::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Io(format!("cannot read config {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::Config(format!("invalid config {}: {e}", path.display()))
                })?
            }
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let cfg = |e: vtfit_core::Error| CliError::Config(e.to_string());
        self.oracle.validate().map_err(cfg)?;
        self.ranges.validate().map_err(cfg)?;
        self.bench.validate().map_err(cfg)?;
        if self.training.n < 1 {
            return Err(CliError::Config("training.n must be at least 1".into()));
        }
        if self.sweep_points < 1 {
            return Err(CliError::Config("sweep_points must be at least 1".into()));
        }
        if self.metrics.histogram_bins < 1 {
            return Err(CliError::Config(
                "metrics.histogram_bins must be at least 1".into(),
            ));
        }
        if self.test_signals.is_empty() {
            return Err(CliError::Config(
                "at least one test signal must be configured".into(),
            ));
        }
        let mut names = std::collections::HashSet::new();
        for signal in &self.test_signals {
            if signal.name.is_empty()
                || !signal
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            {
                return Err(CliError::Config(format!(
                    "signal name '{}' must be non-empty and use only [A-Za-z0-9_-]",
                    signal.name
                )));
            }
            if !names.insert(&signal.name) {
                return Err(CliError::Config(format!(
                    "duplicate signal name '{}'",
                    signal.name
                )));
            }
            if signal.n < 2 {
                return Err(CliError::Config(format!(
                    "signal '{}' needs at least 2 samples",
                    signal.name
                )));
            }
        }
        Ok(())
    }

    /// Fully populated default configuration as pretty JSON.
    pub fn default_json() -> String {
        let mut text = serde_json::to_string_pretty(&ExperimentConfig::default())
            .expect("default config serializes");
        text.push('\n');
        text
    }
}
