//! Scenario files.
//!
//! A scenario file is TOML with three keys: `label`, a `[sim]` table and a
//! `[sortition]` table. Field names mirror `SimConfig` and `SortitionParams`.
//! Unknown keys are rejected.
//!
//! ```toml
//! label = "small-pool"
//!
//! [sim]
//! n_init = 8
//! seed = 1
//!
//! [sortition]
//! percentile_p = 20.0
//! n_act = 5
//! ```

use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sortition_core::experiments::{ScenarioConfig, SelectionMode};
use sortition_core::presets;
use sortition_core::{SimConfig, SortitionParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub label: String,
    pub sim: SimConfig,
    pub sortition: SortitionParams,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid scenario file {}", path.display()))
    }

    pub fn from_preset(name: &str) -> Result<Self> {
        let preset = presets::find(name).with_context(|| {
            let known: Vec<&str> = presets::PRESETS.iter().map(|p| p.name).collect();
            format!("unknown preset `{name}` (known: {})", known.join(", "))
        })?;
        Ok(Self::from_scenario(&preset.config()))
    }

    pub fn from_scenario(cfg: &ScenarioConfig) -> Self {
        ScenarioFile {
            label: cfg.label.clone(),
            sim: cfg.sim,
            sortition: cfg.sortition,
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }

    pub fn scenario(&self, mode: SelectionMode) -> ScenarioConfig {
        ScenarioConfig {
            label: self.label.clone(),
            sim: self.sim,
            sortition: self.sortition,
            mode,
        }
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(seed) = seed {
            self.sim.seed = seed;
        }
        self
    }
}
