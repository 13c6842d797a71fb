//! Exhaustive sweep over Nash equilibria of small graphs.
//!
//! For every labeled graph up to `max_n` vertices and every Nash
//! equilibrium (one per color-relabeling class):
//!
//! - the smallest deviating coalition found at each pruning level is
//!   compared with the unpruned search, which decides agreement of the
//!   existence answer for every `q` at once;
//! - every minimal strong deviation is audited against the structural
//!   claims.

use std::collections::BTreeMap;

use anyhow::Result;
use kcut_core::equilibrium::{
    all_strong_deviations, audit_minimal_deviation, find_strong_deviation, is_nash, Claim, Minimality, Pruning,
};
use kcut_core::graph::{enumerate_all_graphs, Graph};
use kcut_core::Coloring;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::{Counterexample, ExperimentReport};

pub const CLAIMS: [Claim; 8] = [
    Claim::ColorsPreserved,
    Claim::NeighborColor,
    Claim::Connected,
    Claim::IsolatedComponent,
    Claim::SizeAtLeastTwo,
    Claim::CutLowerBound,
    Claim::CutIncreaseFewColors,
    Claim::CutIncreaseSmallCoalition,
];

pub fn claim_name(claim: Claim) -> &'static str {
    match claim {
        Claim::ColorsPreserved => "colors_preserved",
        Claim::NeighborColor => "neighbor_color",
        Claim::Connected => "connected",
        Claim::IsolatedComponent => "isolated_component",
        Claim::SizeAtLeastTwo => "size_at_least_two",
        Claim::CutLowerBound => "cut_lower_bound",
        Claim::CutIncreaseFewColors => "cut_increase_few_colors",
        Claim::CutIncreaseSmallCoalition => "cut_increase_small_coalition",
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub max_n: usize,
    pub ks: Vec<usize>,
    /// Counterexamples kept per kind; all violations are counted.
    pub keep_per_kind: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { max_n: 6, ks: vec![2, 3], keep_per_kind: 25 }
    }
}

#[derive(Default)]
struct Tally {
    nash: u64,
    nash_with_deviation: u64,
    minimal_audited: u64,
    pruning_disagreements: BTreeMap<Pruning, u64>,
    violations: BTreeMap<Claim, u64>,
    counterexamples: Vec<Counterexample>,
}

impl Tally {
    fn keep(&mut self, limit: usize, c: Counterexample) {
        if self.counterexamples.iter().filter(|k| k.kind == c.kind).count() < limit {
            self.counterexamples.push(c);
        }
    }

    fn merge(&mut self, other: Tally) {
        self.nash += other.nash;
        self.nash_with_deviation += other.nash_with_deviation;
        self.minimal_audited += other.minimal_audited;
        for (k, v) in other.pruning_disagreements {
            *self.pruning_disagreements.entry(k).or_default() += v;
        }
        for (k, v) in other.violations {
            *self.violations.entry(k).or_default() += v;
        }
        self.counterexamples.extend(other.counterexamples);
    }
}

fn smallest_coalition(g: &Graph, sigma: &Coloring, pruning: Pruning) -> Result<Option<usize>> {
    Ok(find_strong_deviation(g, sigma, g.n(), pruning)?.certificate().map(|c| c.coalition.len()))
}

fn sweep_graph(g: &Graph, k: usize, keep: usize) -> Result<Tally> {
    let mut tally = Tally::default();
    if g.n() == 0 {
        return Ok(tally);
    }
    for sigma in Coloring::all_canonical(g.n(), k)? {
        if !is_nash(g, &sigma)?.is_nash {
            continue;
        }
        tally.nash += 1;
        let exact = smallest_coalition(g, &sigma, Pruning::L0)?;
        for pruning in [Pruning::L1, Pruning::L2, Pruning::L3] {
            let pruned = smallest_coalition(g, &sigma, pruning)?;
            if pruned != exact {
                *tally.pruning_disagreements.entry(pruning).or_default() += 1;
                tally.keep(keep, Counterexample::new(
                    &format!("pruning_l{}_disagrees", pruning.level()),
                    g,
                    Some(&sigma),
                    format!("smallest deviating coalition: {exact:?} unpruned, {pruned:?} at L{}", pruning.level()),
                ));
            }
        }
        if exact.is_none() {
            continue;
        }
        tally.nash_with_deviation += 1;
        for cert in all_strong_deviations(g, &sigma, g.n())? {
            if cert.minimal != Minimality::Yes {
                continue;
            }
            tally.minimal_audited += 1;
            let audit = audit_minimal_deviation(g, &sigma, &cert)?;
            for finding in audit.violations {
                *tally.violations.entry(finding.claim).or_default() += 1;
                tally.keep(keep, 
                    Counterexample::new(claim_name(finding.claim), g, Some(&sigma), finding.detail.clone())
                        .with_certificate(cert.clone())
                        .with_finding(finding),
                );
            }
        }
    }
    Ok(tally)
}

pub fn run(config: &SweepConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("audit", config);
    report.note("Nash equilibria are enumerated once per color-relabeling class");
    report.note(format!("at most {} counterexamples are kept per kind; stats count all", config.keep_per_kind));
    let mut instances = Vec::new();
    for n in 1..=config.max_n {
        for g in enumerate_all_graphs(n)? {
            for &k in &config.ks {
                instances.push((g.clone(), k));
            }
        }
    }
    let tallies: Vec<Tally> = instances.par_iter().map(|(g, k)| sweep_graph(g, *k, config.keep_per_kind)).collect::<Result<_>>()?;
    let mut total = Tally::default();
    for t in tallies {
        total.merge(t);
    }

    report.stat("instances", instances.len() as u64);
    report.stat("nash_colorings", total.nash);
    report.stat("nash_colorings_with_strong_deviation", total.nash_with_deviation);
    report.stat("minimal_deviations_audited", total.minimal_audited);
    for pruning in [Pruning::L1, Pruning::L2, Pruning::L3] {
        let disagreements = total.pruning_disagreements.get(&pruning).copied().unwrap_or(0);
        report.stat(&format!("pruning_l{}_disagreements", pruning.level()), disagreements);
        report.check(format!("L{} existence answers agree with L0", pruning.level()), 0, disagreements);
    }
    for claim in CLAIMS {
        let count = total.violations.get(&claim).copied().unwrap_or(0);
        report.stat(&format!("violations_{}", claim_name(claim)), count);
        report.check(format!("minimal deviations violating {}", claim_name(claim)), 0, count);
    }

    let mut kept: BTreeMap<String, usize> = BTreeMap::new();
    for c in total.counterexamples {
        let slot = kept.entry(c.kind.clone()).or_default();
        if *slot < config.keep_per_kind {
            *slot += 1;
            report.counterexamples.push(c);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_vertices() {
        let report = run(&SweepConfig { max_n: 4, ..SweepConfig::default() }).unwrap();
        for name in ["L1 existence answers agree with L0", "minimal deviations violating cut_lower_bound"] {
            assert!(report.check_named(name).unwrap().pass, "{name}");
        }
        assert!(report.stats["nash_colorings"] > 0);
    }

    #[test]
    fn claims_have_distinct_names() {
        let names: std::collections::BTreeSet<_> = CLAIMS.iter().map(|&c| claim_name(c)).collect();
        assert_eq!(names.len(), CLAIMS.len());
    }
}
