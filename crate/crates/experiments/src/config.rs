//! Optional TOML config file. Every section is optional; command-line
//! flags take precedence over file values.
//!
//! ```toml
//! seed = 7
//! jobs = 4
//! out_dir = "results"
//!
//! [theorems]
//! mode = "conjecture"
//! max_n = 6
//!
//! [er]
//! avg_degrees = [5.0, 10.0]
//! graphs_per_degree = 10
//! ```

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::dynamics_sweep::DynamicsSweepConfig;
use crate::er::ErConfig;
use crate::figure1::Figure1Config;
use crate::fuzz::FuzzConfig;
use crate::sweep::SweepConfig;
use crate::theorems::{Mode, TheoremsConfig};
use crate::triangle::TriangleConfig;

/// Theorem checks default differently per mode, so the file only
/// overrides fields it names.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremsOverrides {
    pub mode: Option<Mode>,
    pub max_n: Option<usize>,
    pub samples: Option<usize>,
    pub exhaustive: Option<bool>,
    pub ks: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
}

impl TheoremsOverrides {
    pub fn resolve(&self, mode: Option<Mode>) -> TheoremsConfig {
        let mode = mode.or(self.mode).unwrap_or(Mode::Theorem3);
        let mut config = TheoremsConfig::for_mode(mode);
        if let Some(max_n) = self.max_n {
            config.max_n = max_n;
        }
        if self.samples.is_some() {
            config.samples = self.samples;
        }
        if self.exhaustive == Some(true) {
            config.samples = None;
        }
        if let Some(ks) = &self.ks {
            config.ks = ks.clone();
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(budget) = self.budget {
            config.budget = budget;
        }
        config
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub figure1: Figure1Config,
    pub triangle: TriangleConfig,
    pub theorems: TheoremsOverrides,
    pub audit: SweepConfig,
    pub er: ErConfig,
    pub fuzz: FuzzConfig,
    pub dynamics: DynamicsSweepConfig,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }
}
