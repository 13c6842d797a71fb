//! Strong-equilibrium checks on optimal colorings.
//!
//! For every instance all optimal colorings are enumerated (one per
//! color-relabeling class, which is exact because coalition deviations are
//! invariant under relabeling) and each is searched for a strong deviation
//! by coalitions of at most `q` players.

use anyhow::{bail, Result};
use clap::ValueEnum;
use kcut_core::equilibrium::{find_strong_deviation, Pruning};
use kcut_core::graph::{enumerate_all_graphs, generate_er, Graph, RandomGraphSpec};
use kcut_core::solver::{enumerate_optimal, Budget};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::{Counterexample, ExperimentReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Coalitions of at most `min(7, n)` players.
    Theorem3,
    /// Coalitions of any size.
    Conjecture,
    /// Two colors, coalitions of any size.
    K2,
}

impl Mode {
    pub fn q(self, n: usize) -> usize {
        match self {
            Mode::Theorem3 => n.min(7),
            Mode::Conjecture | Mode::K2 => n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TheoremsConfig {
    pub mode: Mode,
    /// Largest graph size.
    pub max_n: usize,
    /// Number of random graphs; all labeled graphs up to `max_n` when absent.
    pub samples: Option<usize>,
    pub ks: Vec<usize>,
    pub seed: u64,
    /// Node budget for each exact solve.
    pub budget: u64,
}

impl Default for TheoremsConfig {
    fn default() -> Self {
        TheoremsConfig::for_mode(Mode::Theorem3)
    }
}

impl TheoremsConfig {
    pub fn for_mode(mode: Mode) -> Self {
        let base = TheoremsConfig { mode, max_n: 6, samples: None, ks: vec![3], seed: 0, budget: 50_000_000 };
        match mode {
            Mode::Theorem3 => TheoremsConfig { max_n: 12, samples: Some(200), ks: vec![2, 3], ..base },
            Mode::Conjecture => base,
            Mode::K2 => TheoremsConfig { ks: vec![2], ..base },
        }
    }
}

/// Average degrees cycled through by the sampled instances.
const SAMPLE_DEGREES: [f64; 4] = [1.5, 2.5, 3.5, 5.0];

/// The `i`-th sampled graph: sizes cycle through `4..=max_n`.
pub fn sample_spec(i: usize, max_n: usize, seed: u64) -> RandomGraphSpec {
    let n = 4 + i % (max_n.max(4) - 3);
    let avg_degree = SAMPLE_DEGREES[(i / (max_n.max(4) - 3)) % SAMPLE_DEGREES.len()].min(n as f64 - 1.0);
    RandomGraphSpec { n, avg_degree, seed: seed.wrapping_add(i as u64) }
}

#[derive(Clone, Debug, Serialize)]
struct Outcome {
    n: usize,
    m: usize,
    k: usize,
    q: usize,
    best: usize,
    optima: usize,
    labeled_optima: u64,
    #[serde(skip)]
    counterexamples: Vec<Counterexample>,
}

fn check_instance(g: &Graph, k: usize, q: usize, budget: u64) -> Result<Outcome> {
    let opt = enumerate_optimal(g, k, Budget(budget))?;
    let mut counterexamples = Vec::new();
    for sigma in &opt.witnesses {
        if let Some(cert) = find_strong_deviation(g, sigma, q, Pruning::L0)?.certificate() {
            if !cert.verify(g, sigma)? {
                bail!("search returned a certificate that fails recomputation");
            }
            counterexamples.push(
                Counterexample::new("optimum_not_strong_equilibrium", g, Some(sigma), format!("k={k}, q={q}"))
                    .with_certificate(cert.clone()),
            );
        }
    }
    Ok(Outcome {
        n: g.n(),
        m: g.m(),
        k,
        q,
        best: opt.best_value,
        optima: opt.witnesses.len(),
        labeled_optima: opt.count_labeled.unwrap_or(0),
        counterexamples,
    })
}

pub fn run(config: &TheoremsConfig) -> Result<ExperimentReport> {
    let ks = if config.mode == Mode::K2 { vec![2] } else { config.ks.clone() };
    let mut report = ExperimentReport::new("verify-theorems", config);
    report.note("optimal colorings are checked once per color-relabeling class");
    let graphs: Vec<(Option<RandomGraphSpec>, Graph)> = match config.samples {
        Some(count) => (0..count)
            .map(|i| {
                let spec = sample_spec(i, config.max_n, config.seed);
                Ok((Some(spec), generate_er(&spec)?))
            })
            .collect::<Result<_>>()?,
        None => {
            report.note(format!("every labeled graph with 1..={} vertices", config.max_n));
            let mut all = Vec::new();
            for n in 1..=config.max_n {
                all.extend(enumerate_all_graphs(n)?.map(|g| (None, g)));
            }
            all
        }
    };
    let jobs: Vec<(usize, usize)> = (0..graphs.len()).flat_map(|i| ks.iter().map(move |&k| (i, k))).collect();
    let outcomes: Vec<Outcome> = jobs
        .par_iter()
        .map(|&(i, k)| {
            let g = &graphs[i].1;
            check_instance(g, k, config.mode.q(g.n()), config.budget)
        })
        .collect::<Result<_>>()?;

    report.stat("graphs", graphs.len() as u64);
    report.stat("instances", outcomes.len() as u64);
    report.stat("optima_checked", outcomes.iter().map(|o| o.optima as u64).sum());
    report.stat("labeled_optima", outcomes.iter().map(|o| o.labeled_optima).sum());
    for (&(i, _), o) in jobs.iter().zip(&outcomes) {
        if let Some(spec) = &graphs[i].0 {
            let mut record = serde_json::to_value(o)?;
            record["spec"] = serde_json::to_value(spec)?;
            record["counterexamples"] = o.counterexamples.len().into();
            report.records.push(record);
        }
    }
    let found: Vec<Counterexample> = outcomes.into_iter().flat_map(|o| o.counterexamples).collect();
    report.check("optimal colorings with a strong deviation", 0, found.len());
    report.counterexamples = found;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_plan_covers_sizes() {
        let sizes: std::collections::BTreeSet<usize> = (0..200).map(|i| sample_spec(i, 12, 0).n).collect();
        assert_eq!(sizes, (4..=12).collect());
        assert!((0..200).all(|i| sample_spec(i, 12, 0).avg_degree <= sample_spec(i, 12, 0).n as f64 - 1.0));
    }

    #[test]
    fn small_exhaustive_runs_clean() {
        for mode in [Mode::Theorem3, Mode::Conjecture, Mode::K2] {
            let config = TheoremsConfig { max_n: 4, samples: None, ks: vec![2, 3], ..TheoremsConfig::for_mode(mode) };
            let report = run(&config).unwrap();
            assert!(report.passed(), "{mode:?}");
            assert_eq!(report.stats["graphs"], 1 + 2 + 8 + 64);
        }
    }

    #[test]
    fn complete_graph_optima_resist_coalitions() {
        let g = Graph::complete(4).unwrap();
        let o = check_instance(&g, 3, 4, u64::MAX).unwrap();
        assert_eq!(o.best, 5);
        assert!(o.counterexamples.is_empty());
    }
}
