//! Run configuration: one structured file driving the whole pipeline.
//!
//! TOML sections mirror the library configs. Unknown keys are rejected.
//! The global `seed` feeds every stage; a `--seed` flag override wins over
//! the file and re-derives the section seeds.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use schedrl_core::dqn::DqnConfig;
use schedrl_core::env::EnvConfig;
use schedrl_core::oracle::OracleConfig;
use schedrl_core::sim::SimConfig;

/// Environment variable naming the default config file.
pub const CONFIG_ENV_VAR: &str = "SCHEDRL_CONFIG";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSettings {
    /// Seed of the per-episode streams stochastic policies draw from during
    /// evaluation; defaults to the global seed.
    pub policy_seed: Option<u64>,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self { policy_seed: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Global seed; `--seed` overrides it and the per-section seeds.
    pub seed: u64,
    pub out_dir: PathBuf,
    pub simulator: SimConfig,
    pub oracle: OracleConfig,
    pub environment: EnvConfig,
    pub dqn: DqnConfig,
    pub evaluation: EvalSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            out_dir: PathBuf::from("runs"),
            simulator: SimConfig::default(),
            oracle: OracleConfig::default(),
            environment: EnvConfig::default(),
            dqn: DqnConfig::default(),
            evaluation: EvalSettings::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        // The global seed feeds every section that did not pin its own.
        let raw: toml::Value = toml::from_str(&text)?;
        let pinned = |section: &str| {
            raw.get(section)
                .and_then(|s| s.get("seed"))
                .is_some()
        };
        if !pinned("simulator") {
            cfg.simulator.seed = cfg.seed;
        }
        if !pinned("dqn") {
            cfg.dqn.seed = cfg.seed;
        }
        Ok(cfg)
    }

    /// Propagates a `--seed` override into every seeded section.
    pub fn override_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.simulator.seed = seed;
        self.dqn.seed = seed;
        self.evaluation.policy_seed = Some(seed);
    }

    pub fn policy_seed(&self) -> u64 {
        self.evaluation.policy_seed.unwrap_or(self.seed)
    }

    /// Cross-section consistency: channel counts and parameter ranges.
    pub fn validate(&self) -> anyhow::Result<()> {
        let k = self.simulator.n_channels;
        self.simulator.validate()?;
        self.oracle.validate(k)?;
        self.environment.validate(k)?;
        self.dqn.validate()?;
        Ok(())
    }

    /// Canonical single-line JSON echo embedded in output artifacts.
    pub fn echo_json(&self) -> anyhow::Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

pub fn parse_f64_list(s: &str, expected_len: usize, what: &str) -> anyhow::Result<Vec<f64>> {
    let values = s
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<Vec<f64>, _>>()
        .with_context(|| format!("parsing {what} list {s:?}"))?;
    if values.len() != expected_len {
        bail!("{what} needs {expected_len} comma-separated values, got {}", values.len());
    }
    Ok(values)
}
