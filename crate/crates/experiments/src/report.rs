//! Experiment reports: golden checks, histograms and counterexamples.
//!
//! Reports carry no timestamps or timings, so rerunning a config produces
//! byte-identical output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use kcut_core::equilibrium::{DeviationCertificate, Finding};
use kcut_core::{Coloring, Graph};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = concat!("kcut ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: Value,
    pub actual: Value,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub name: String,
    /// `bins[i]` counts observations of size `i`.
    pub bins: Vec<u64>,
}

impl Histogram {
    pub fn new(name: impl Into<String>, len: usize) -> Self {
        Histogram { name: name.into(), bins: vec![0; len] }
    }

    pub fn add(&mut self, size: usize) {
        self.bins[size] += 1;
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().sum()
    }
}

/// A claim that failed on a concrete instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub kind: String,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Coloring>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<DeviationCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finding: Option<Finding>,
    pub detail: String,
}

impl Counterexample {
    pub fn new(kind: &str, g: &Graph, sigma: Option<&Coloring>, detail: impl Into<String>) -> Self {
        Counterexample {
            kind: kind.to_string(),
            n: g.n(),
            edges: g.edges().collect(),
            sigma: sigma.cloned(),
            certificate: None,
            finding: None,
            detail: detail.into(),
        }
    }

    pub fn with_certificate(mut self, cert: DeviationCertificate) -> Self {
        self.certificate = Some(cert);
        self
    }

    pub fn with_finding(mut self, finding: Finding) -> Self {
        self.finding = Some(finding);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub tool_version: String,
    pub config_digest: String,
    pub config: Value,
    /// Interpretation choices that shape the numbers below.
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
    pub stats: BTreeMap<String, u64>,
    pub histograms: Vec<Histogram>,
    pub records: Vec<Value>,
    pub counterexamples: Vec<Counterexample>,
}

/// Hex SHA-256 of the config's JSON serialization.
pub fn config_digest(config: &Value) -> String {
    let bytes = serde_json::to_vec(config).expect("JSON values serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl ExperimentReport {
    pub fn new<C: Serialize>(experiment: &str, config: &C) -> Self {
        let config = serde_json::to_value(config).expect("configs serialize");
        ExperimentReport {
            experiment: experiment.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            config_digest: config_digest(&config),
            config,
            notes: Vec::new(),
            checks: Vec::new(),
            stats: BTreeMap::new(),
            histograms: Vec::new(),
            records: Vec::new(),
            counterexamples: Vec::new(),
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Records a check comparing `actual` against `expected` for equality.
    pub fn check<T: Serialize + PartialEq>(&mut self, name: impl Into<String>, expected: T, actual: T) -> bool {
        let pass = expected == actual;
        self.checks.push(Check {
            name: name.into(),
            expected: serde_json::to_value(&expected).expect("serializable"),
            actual: serde_json::to_value(&actual).expect("serializable"),
            pass,
        });
        pass
    }

    pub fn stat(&mut self, name: &str, value: u64) {
        self.stats.insert(name.to_string(), value);
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass) && self.counterexamples.is_empty()
    }

    /// 0 when every check passes and nothing was refuted, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    /// Writes `<dir>/<experiment>.json` and returns its path.
    pub fn write(&self, dir: &Path) -> std::io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.json", self.experiment));
        fs::write(&path, self.to_json())?;
        Ok(path)
    }

    pub fn summary(&self) -> String {
        let failed = self.failed_checks().count();
        format!(
            "{}: {} checks, {} failed, {} counterexamples",
            self.experiment,
            self.checks.len(),
            failed,
            self.counterexamples.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_depends_only_on_config() {
        let a = ExperimentReport::new("x", &serde_json::json!({"seed": 1}));
        let b = ExperimentReport::new("x", &serde_json::json!({"seed": 1}));
        let c = ExperimentReport::new("x", &serde_json::json!({"seed": 2}));
        assert_eq!(a.config_digest, b.config_digest);
        assert_ne!(a.config_digest, c.config_digest);
        assert_eq!(a.config_digest.len(), 64);
    }

    #[test]
    fn exit_codes() {
        let mut r = ExperimentReport::new("x", &());
        assert!(r.check("one", 1, 1));
        assert_eq!(r.exit_code(), 0);
        assert!(!r.check("two", 2, 3));
        assert_eq!(r.exit_code(), 2);
        assert_eq!(r.failed_checks().count(), 1);
    }
}
