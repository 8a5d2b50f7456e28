//! Run configuration shared by every subcommand.

use std::collections::BTreeMap;

use hfdt_core::infer2::{Preset, DEFAULT_SEARCH_BUDGET};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Human,
    Machine,
}

/// Everything that influences a run's output. Serialized into each report
/// header so a run can be reproduced from its output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: u8,
    pub pool: String,
    pub atoms: BTreeMap<String, String>,
    pub depth: usize,
    pub budget: usize,
    pub preset: String,
    pub format: Format,
    /// Cap on listed models or search results.
    pub limit: usize,
    /// Size guard on materialized sets.
    pub guard: usize,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            system: 1,
            pool: "rank2".into(),
            atoms: BTreeMap::new(),
            depth: 3,
            budget: DEFAULT_SEARCH_BUDGET,
            preset: Preset::default().name().into(),
            format: Format::Human,
            limit: 10,
            guard: hfdt_core::semantics1::DEFAULT_SIZE_GUARD,
        }
    }
}

/// Flag values that override a config file when present.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub system: Option<u8>,
    pub pool: Option<String>,
    pub atoms: Vec<(String, String)>,
    pub depth: Option<usize>,
    pub budget: Option<usize>,
    pub preset: Option<String>,
    pub format: Option<Format>,
    pub limit: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(src: &str) -> Result<RunConfig, toml::de::Error> {
        toml::from_str(src)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.system {
            self.system = v;
        }
        if let Some(v) = &o.pool {
            self.pool = v.clone();
        }
        for (k, v) in &o.atoms {
            self.atoms.insert(k.clone(), v.clone());
        }
        if let Some(v) = o.depth {
            self.depth = v;
        }
        if let Some(v) = o.budget {
            self.budget = v;
        }
        if let Some(v) = &o.preset {
            self.preset = v.clone();
        }
        if let Some(v) = o.format {
            self.format = v;
        }
        if let Some(v) = o.limit {
            self.limit = v;
        }
    }

    /// The config as TOML, one key per line, deterministic order.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
