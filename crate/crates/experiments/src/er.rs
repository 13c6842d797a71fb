//! Deviation sizes between optimal colorings of random graphs.
//!
//! For each graph, every optimal coloring is enumerated (one per
//! color-relabeling class). For each ordered pair `(σ, γ)` of distinct
//! optima the deviation size is the fewest vertices that must change color
//! to move from `σ` to some relabeling of `γ`. Every relabeling is also
//! checked not to be a strong deviation from `σ`.

use anyhow::{bail, Result};
use kcut_core::game::{self, Coloring};
use kcut_core::graph::{generate_er, Graph, RandomGraphSpec};
use kcut_core::solver::{color_relabelings, enumerate_optimal, Budget};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::{Counterexample, ExperimentReport, Histogram};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ErConfig {
    pub n: usize,
    pub avg_degrees: Vec<f64>,
    pub graphs_per_degree: usize,
    pub k: usize,
    pub seed: u64,
    /// Node budget for each exact solve.
    pub budget: u64,
}

impl Default for ErConfig {
    fn default() -> Self {
        ErConfig { n: 15, avg_degrees: vec![5.0, 10.0], graphs_per_degree: 10, k: 3, seed: 0, budget: 500_000_000 }
    }
}

impl ErConfig {
    /// Specs in order: all graphs of the first degree group, then the next.
    pub fn specs(&self) -> Vec<RandomGraphSpec> {
        let mut out = Vec::new();
        for (group, &avg_degree) in self.avg_degrees.iter().enumerate() {
            for i in 0..self.graphs_per_degree {
                let offset = (group * self.graphs_per_degree + i) as u64;
                out.push(RandomGraphSpec { n: self.n, avg_degree, seed: self.seed.wrapping_add(offset) });
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphOutcome {
    pub spec: RandomGraphSpec,
    pub m: usize,
    pub best: usize,
    pub optima: usize,
    pub labeled_optima: u64,
    pub pairs: u64,
    /// `sizes[s]` counts ordered pairs with deviation size `s`.
    pub sizes: Vec<u64>,
    #[serde(skip)]
    pub counterexamples: Vec<Counterexample>,
}

/// Deviation size from `sigma` to the closest relabeling of `gamma`, and
/// the relabelings that would be strong deviations.
pub fn compare_optima(g: &Graph, sigma: &Coloring, gamma: &Coloring) -> Result<(usize, Vec<Coloring>)> {
    let mut smallest = usize::MAX;
    let mut strong = Vec::new();
    for target in color_relabelings(gamma) {
        let moved = game::deviating_set(sigma, &target)?;
        smallest = smallest.min(moved.len());
        if moved.is_empty() {
            continue;
        }
        let mut all_gain = true;
        for v in moved {
            all_gain &= game::payoff(g, &target, v)? > game::payoff(g, sigma, v)?;
        }
        if all_gain {
            strong.push(target);
        }
    }
    Ok((smallest, strong))
}

fn analyze(spec: &RandomGraphSpec, k: usize, budget: u64) -> Result<GraphOutcome> {
    let g = generate_er(spec)?;
    let opt = enumerate_optimal(&g, k, Budget(budget))?;
    let mut sizes = vec![0u64; g.n() + 1];
    let mut counterexamples = Vec::new();
    let mut pairs = 0;
    for (i, sigma) in opt.witnesses.iter().enumerate() {
        for (j, gamma) in opt.witnesses.iter().enumerate() {
            if i == j {
                continue;
            }
            let (size, strong) = compare_optima(&g, sigma, gamma)?;
            if size == 0 {
                bail!("distinct canonical optima must differ on some vertex");
            }
            sizes[size] += 1;
            pairs += 1;
            for target in strong {
                counterexamples.push(Counterexample::new(
                    "strong_deviation_between_optima",
                    &g,
                    Some(sigma),
                    format!("target {:?}", target.as_slice()),
                ));
            }
        }
    }
    Ok(GraphOutcome {
        spec: *spec,
        m: g.m(),
        best: opt.best_value,
        optima: opt.witnesses.len(),
        labeled_optima: opt.count_labeled.unwrap_or(0),
        pairs,
        sizes,
        counterexamples,
    })
}

pub fn histogram_name(avg_degree: f64) -> String {
    format!("avg_degree_{avg_degree}")
}

pub fn run(config: &ErConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("er-experiment", config);
    report.note(format!("k = {} colors", config.k));
    report.note(format!("{} graphs per average degree", config.graphs_per_degree));
    report.note("pairs are ordered pairs of distinct optima, one optimum per color-relabeling class");
    report.note("deviation size is minimized over relabelings of the second optimum");
    let specs = config.specs();
    let outcomes: Vec<GraphOutcome> =
        specs.par_iter().map(|spec| analyze(spec, config.k, config.budget)).collect::<Result<_>>()?;

    let mut total = Histogram::new("all", config.n + 1);
    for &degree in &config.avg_degrees {
        let mut h = Histogram::new(histogram_name(degree), config.n + 1);
        for o in outcomes.iter().filter(|o| o.spec.avg_degree == degree) {
            for (size, &count) in o.sizes.iter().enumerate() {
                h.bins[size] += count;
                total.bins[size] += count;
            }
        }
        report.histograms.push(h);
    }
    let pairs: u64 = outcomes.iter().map(|o| o.pairs).sum();
    report.check("histogram counts sum to the number of ordered optimum pairs", pairs, total.total());
    report.histograms.push(total);
    report.stat("graphs", outcomes.len() as u64);
    report.stat("ordered_pairs", pairs);
    report.stat("optima", outcomes.iter().map(|o| o.optima as u64).sum());

    let mut found = Vec::new();
    for o in outcomes {
        report.records.push(serde_json::to_value(&o)?);
        found.extend(o.counterexamples);
    }
    report.check("strong deviations between optima", 0, found.len());
    report.counterexamples = found;
    Ok(report)
}

/// One row per deviation size, one column per histogram.
pub fn histogram_csv(report: &ExperimentReport) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["size".to_string()];
    header.extend(report.histograms.iter().map(|h| h.name.clone()));
    writer.write_record(&header)?;
    let rows = report.histograms.iter().map(|h| h.bins.len()).max().unwrap_or(0);
    for size in 0..rows {
        let mut row = vec![size.to_string()];
        row.extend(report.histograms.iter().map(|h| h.bins.get(size).copied().unwrap_or(0).to_string()));
        writer.write_record(&row)?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}
