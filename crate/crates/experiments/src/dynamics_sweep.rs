//! Best-response and single-player coalition dynamics on random instances.

use anyhow::Result;
use kcut_core::dynamics::{replay, run_best_response, run_coalition_dynamics, Schedule, Terminal, Trace};
use kcut_core::equilibrium::is_nash;
use kcut_core::graph::{generate_er, Graph, RandomGraphSpec};
use kcut_core::Coloring;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::{Counterexample, ExperimentReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynamicsSweepConfig {
    pub instances: usize,
    pub seed: u64,
    pub max_n: usize,
    pub max_k: usize,
}

impl Default for DynamicsSweepConfig {
    fn default() -> Self {
        DynamicsSweepConfig { instances: 1000, seed: 0, max_n: 20, max_k: 4 }
    }
}

/// The `i`-th instance: graph, starting coloring.
pub fn instance(config: &DynamicsSweepConfig, i: usize) -> Result<(RandomGraphSpec, Graph, Coloring)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(i as u64));
    let n = rng.gen_range(2..=config.max_n);
    let k = rng.gen_range(2..=config.max_k);
    let avg_degree = rng.gen_range(0.5..=6.0f64).min((n - 1) as f64);
    let spec = RandomGraphSpec { n, avg_degree, seed: rng.gen() };
    let g = generate_er(&spec)?;
    let sigma0 = Coloring::new((0..n).map(|_| rng.gen_range(1..=k as u8)).collect(), k)?;
    Ok((spec, g, sigma0))
}

#[derive(Default)]
struct Tally {
    runs: u64,
    steps: u64,
    not_converged: u64,
    too_long: u64,
    not_nash: u64,
    non_improving_step: u64,
    replay_failures: u64,
    cycles: u64,
    counterexamples: Vec<Counterexample>,
}

impl Tally {
    fn record(&mut self, label: &str, g: &Graph, trace: &Trace) -> Result<()> {
        self.runs += 1;
        self.steps += trace.steps.len() as u64;
        let mut problems = Vec::new();
        if trace.terminal != Terminal::Converged {
            self.not_converged += 1;
            problems.push(format!("terminal {:?}", trace.terminal));
        }
        if trace.steps.len() > g.m() {
            self.too_long += 1;
            problems.push(format!("{} steps > m = {}", trace.steps.len(), g.m()));
        }
        if !is_nash(g, &trace.final_coloring)?.is_nash {
            self.not_nash += 1;
            problems.push("final coloring is not a Nash equilibrium".into());
        }
        if trace.steps.iter().any(|s| s.delta_s < 1) {
            self.non_improving_step += 1;
            problems.push("a step does not increase the cut".into());
        }
        if replay(g, trace).ok().as_ref() != Some(&trace.final_coloring) {
            self.replay_failures += 1;
            problems.push("replay does not reproduce the final coloring".into());
        }
        if trace.cycle.is_some() {
            self.cycles += 1;
            problems.push("cycle reported".into());
        }
        if !problems.is_empty() {
            self.counterexamples.push(Counterexample::new(
                &format!("dynamics_{label}"),
                g,
                Some(&trace.sigma0),
                problems.join("; "),
            ));
        }
        Ok(())
    }

    fn merge(&mut self, o: Tally) {
        self.runs += o.runs;
        self.steps += o.steps;
        self.not_converged += o.not_converged;
        self.too_long += o.too_long;
        self.not_nash += o.not_nash;
        self.non_improving_step += o.non_improving_step;
        self.replay_failures += o.replay_failures;
        self.cycles += o.cycles;
        self.counterexamples.extend(o.counterexamples);
    }
}

/// Round-robin best response, seeded-random best response, and coalition
/// dynamics with `q = 1`, each allowed one step more than `m`.
fn run_instance(config: &DynamicsSweepConfig, i: usize) -> Result<[Tally; 3]> {
    let (_, g, sigma0) = instance(config, i)?;
    let limit = g.m() + 1;
    let mut out: [Tally; 3] = Default::default();
    let seed = config.seed.wrapping_add(i as u64);
    out[0].record("round_robin", &g, &run_best_response(&g, &sigma0, Schedule::RoundRobin, limit)?)?;
    out[1].record("seeded_random", &g, &run_best_response(&g, &sigma0, Schedule::SeededRandom(seed), limit)?)?;
    out[2].record("coalition_q1", &g, &run_coalition_dynamics(&g, &sigma0, 1, limit)?)?;
    Ok(out)
}

pub const LABELS: [&str; 3] = ["round_robin", "seeded_random", "coalition_q1"];

pub fn run(config: &DynamicsSweepConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("dynamics", config);
    report.note("every run may take at most m + 1 steps; exceeding m is reported");
    let per_instance: Vec<[Tally; 3]> =
        (0..config.instances).into_par_iter().map(|i| run_instance(config, i)).collect::<Result<_>>()?;
    let mut totals: [Tally; 3] = Default::default();
    for tallies in per_instance {
        for (total, t) in totals.iter_mut().zip(tallies) {
            total.merge(t);
        }
    }
    for (label, t) in LABELS.iter().zip(totals) {
        report.stat(&format!("{label}_runs"), t.runs);
        report.stat(&format!("{label}_steps"), t.steps);
        report.check(format!("{label}: runs that did not converge"), 0, t.not_converged);
        report.check(format!("{label}: runs longer than m steps"), 0, t.too_long);
        report.check(format!("{label}: final colorings that are not Nash equilibria"), 0, t.not_nash);
        report.check(format!("{label}: runs with a non-improving step"), 0, t.non_improving_step);
        report.check(format!("{label}: traces that fail replay"), 0, t.replay_failures);
        report.check(format!("{label}: cycles reported"), 0, t.cycles);
        report.counterexamples.extend(t.counterexamples);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_passes() {
        let config = DynamicsSweepConfig { instances: 50, ..DynamicsSweepConfig::default() };
        let report = run(&config).unwrap();
        assert!(report.passed(), "{:?}", report.failed_checks().collect::<Vec<_>>());
        assert_eq!(report.stats["coalition_q1_runs"], 50);
    }

    #[test]
    fn instances_respect_bounds() {
        let config = DynamicsSweepConfig::default();
        for i in 0..200 {
            let (spec, g, sigma0) = instance(&config, i).unwrap();
            assert!((2..=20).contains(&g.n()) && (2..=4).contains(&sigma0.k()));
            assert!(spec.avg_degree <= (g.n() - 1) as f64);
        }
    }
}
