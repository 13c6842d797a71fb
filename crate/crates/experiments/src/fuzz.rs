//! Zero-tolerance checks of the cut accounting identities.
//!
//! For a coalition `C` deviating from `σ` to `γ`:
//!
//! `S(γ) - S(σ) = Σ_{v ∈ C} (μ_v(γ) - μ_v(σ)) - P_C(σ, γ) + P_C(γ, σ)`
//!
//! Also checked: `P_C` against its half-sum form over the adjacency matrix,
//! `SW = 2 S`, and that for disjoint `V1, V2` the double sum of
//! bichromatic adjacencies from `V1` to `V2` equals the one from `V2` to
//! `V1`. Library results are compared with literal sums over `a_{v,u}`.

use anyhow::Result;
use kcut_core::game::{self, Coloring};
use kcut_core::graph::{enumerate_all_graphs, generate_er, Graph, RandomGraphSpec};
use kcut_core::VertexSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::{Counterexample, ExperimentReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FuzzConfig {
    pub count: usize,
    pub seed: u64,
    pub max_n: usize,
    pub max_k: usize,
    /// Every graph, coloring pair and vertex split up to this size is also
    /// checked, with `k ≤ exhaustive_max_k`.
    pub exhaustive_max_n: usize,
    pub exhaustive_max_k: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig { count: 10_000, seed: 0, max_n: 12, max_k: 4, exhaustive_max_n: 4, exhaustive_max_k: 3 }
    }
}

fn a(g: &Graph, u: usize, v: usize) -> i64 {
    g.has_edge(u, v) as i64
}

/// `Σ_{v ∈ from} Σ_{u ∈ to, σ_u ≠ σ_v} a_{v,u}`.
fn bichromatic_sum(g: &Graph, sigma: &Coloring, from: VertexSet, to: VertexSet) -> i64 {
    from.iter()
        .map(|v| to.iter().filter(|&u| sigma.color(u) != sigma.color(v)).map(|u| a(g, v, u)).sum::<i64>())
        .sum()
}

fn literal_cut(g: &Graph, sigma: &Coloring) -> i64 {
    let all = g.vertices();
    bichromatic_sum(g, sigma, all, all) / 2
}

fn literal_payoff(g: &Graph, sigma: &Coloring, v: usize) -> i64 {
    bichromatic_sum(g, sigma, VertexSet::singleton(v), g.vertices())
}

/// `½ Σ_{v ∈ C} Σ_{j ∈ C, γ_j ≠ γ_v, σ_j = σ_v} a_{v,j}`, doubled to stay
/// integral.
fn twice_pc_half_sum(g: &Graph, sigma: &Coloring, gamma: &Coloring, c: VertexSet) -> i64 {
    c.iter()
        .map(|v| {
            c.iter()
                .filter(|&j| gamma.color(j) != gamma.color(v) && sigma.color(j) == sigma.color(v))
                .map(|j| a(g, v, j))
                .sum::<i64>()
        })
        .sum()
}

#[derive(Default)]
struct Tally {
    instances: u64,
    identity: u64,
    half_sum: u64,
    welfare: u64,
    symmetry: u64,
    counterexamples: Vec<Counterexample>,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        self.instances += other.instances;
        self.identity += other.identity;
        self.half_sum += other.half_sum;
        self.welfare += other.welfare;
        self.symmetry += other.symmetry;
        self.counterexamples.extend(other.counterexamples);
    }

    fn fail(&mut self, kind: &str, g: &Graph, sigma: &Coloring, detail: String) {
        self.counterexamples.push(Counterexample::new(kind, g, Some(sigma), detail));
    }

    fn check_pair(&mut self, g: &Graph, sigma: &Coloring, gamma: &Coloring) -> Result<()> {
        self.instances += 1;
        let c = game::deviating_set(sigma, gamma)?;
        let lhs = game::cut_difference(g, sigma, gamma)?;
        let mut rhs = -(game::p_c(g, sigma, gamma, c)? as i64) + game::p_c(g, gamma, sigma, c)? as i64;
        for v in c {
            rhs += game::payoff(g, gamma, v)? as i64 - game::payoff(g, sigma, v)? as i64;
        }
        let literal_lhs = literal_cut(g, gamma) - literal_cut(g, sigma);
        if lhs != rhs || lhs != literal_lhs {
            self.identity += 1;
            self.fail("cut_identity", g, sigma, format!("gamma {:?}: {lhs} vs {rhs} vs {literal_lhs}", gamma.as_slice()));
        }
        let pc = game::p_c(g, sigma, gamma, c)? as i64;
        if 2 * pc != twice_pc_half_sum(g, sigma, gamma, c) {
            self.half_sum += 1;
            self.fail("pc_half_sum", g, sigma, format!("gamma {:?}", gamma.as_slice()));
        }
        let s = game::cut_value(g, sigma)? as i64;
        let payoffs_ok = (0..g.n()).all(|v| game::payoff(g, sigma, v).map(|p| p as i64) == Ok(literal_payoff(g, sigma, v)));
        if game::social_welfare(g, sigma)? as i64 != 2 * s || s != literal_cut(g, sigma) || !payoffs_ok {
            self.welfare += 1;
            self.fail("welfare", g, sigma, String::new());
        }
        Ok(())
    }

    fn check_symmetry(&mut self, g: &Graph, sigma: &Coloring, v1: VertexSet, v2: VertexSet) {
        if bichromatic_sum(g, sigma, v1, v2) != bichromatic_sum(g, sigma, v2, v1) {
            self.symmetry += 1;
            self.fail("symmetry", g, sigma, format!("V1 {v1:?}, V2 {v2:?}"));
        }
    }
}

fn random_sample(config: &FuzzConfig, i: usize) -> Result<Tally> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(i as u64));
    let n = rng.gen_range(1..=config.max_n);
    let k = rng.gen_range(1..=config.max_k);
    let avg_degree = rng.gen::<f64>() * (n - 1) as f64;
    let g = generate_er(&RandomGraphSpec { n, avg_degree, seed: rng.gen() })?;
    let sigma = Coloring::new((0..n).map(|_| rng.gen_range(1..=k as u8)).collect(), k)?;
    let gamma = if rng.gen_bool(0.125) {
        sigma.clone()
    } else {
        let colors = (0..n).map(|v| if rng.gen_bool(0.5) { rng.gen_range(1..=k as u8) } else { sigma.color(v) });
        Coloring::new(colors.collect(), k)?
    };
    let mut tally = Tally::default();
    tally.check_pair(&g, &sigma, &gamma)?;
    let (mut v1, mut v2) = (VertexSet::EMPTY, VertexSet::EMPTY);
    for v in 0..n {
        match rng.gen_range(0..3) {
            0 => v1.insert(v),
            1 => v2.insert(v),
            _ => {}
        }
    }
    tally.check_symmetry(&g, &sigma, v1, v2);
    Ok(tally)
}

fn exhaustive_graph(g: &Graph, max_k: usize) -> Result<Tally> {
    let n = g.n();
    let mut tally = Tally::default();
    for k in 1..=max_k {
        let colorings: Vec<Coloring> =
            (0..(k as u64).pow(n as u32)).map(|i| Coloring::from_index(i, n, k)).collect::<Result<_, _>>()?;
        for sigma in &colorings {
            for gamma in &colorings {
                tally.check_pair(g, sigma, gamma)?;
            }
            for split in 0..3u64.pow(n as u32) {
                let (mut v1, mut v2, mut rest) = (VertexSet::EMPTY, VertexSet::EMPTY, split);
                for v in 0..n {
                    match rest % 3 {
                        0 => v1.insert(v),
                        1 => v2.insert(v),
                        _ => {}
                    }
                    rest /= 3;
                }
                tally.check_symmetry(g, sigma, v1, v2);
            }
        }
    }
    Ok(tally)
}

pub fn run(config: &FuzzConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("identity-fuzz", config);
    let random: Vec<Tally> = (0..config.count).into_par_iter().map(|i| random_sample(config, i)).collect::<Result<_>>()?;
    let mut graphs = Vec::new();
    for n in 1..=config.exhaustive_max_n {
        graphs.extend(enumerate_all_graphs(n)?);
    }
    let exhaustive: Vec<Tally> =
        graphs.par_iter().map(|g| exhaustive_graph(g, config.exhaustive_max_k)).collect::<Result<_>>()?;

    let mut random_total = Tally::default();
    random.into_iter().for_each(|t| random_total.merge(t));
    let mut exhaustive_total = Tally::default();
    exhaustive.into_iter().for_each(|t| exhaustive_total.merge(t));
    report.stat("random_instances", random_total.instances);
    report.stat("exhaustive_instances", exhaustive_total.instances);
    for (label, t) in [("random", &random_total), ("exhaustive", &exhaustive_total)] {
        report.check(format!("{label}: cut identity violations"), 0, t.identity);
        report.check(format!("{label}: P_C half-sum violations"), 0, t.half_sum);
        report.check(format!("{label}: welfare and payoff violations"), 0, t.welfare);
        report.check(format!("{label}: symmetry violations"), 0, t.symmetry);
    }
    report.counterexamples.extend(random_total.counterexamples);
    report.counterexamples.extend(exhaustive_total.counterexamples);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_repeats() {
        let config = FuzzConfig { count: 300, exhaustive_max_n: 3, ..FuzzConfig::default() };
        let a = run(&config).unwrap();
        assert!(a.passed(), "{:?}", a.failed_checks().collect::<Vec<_>>());
        assert_eq!(a.stats["random_instances"], 300);
        assert_eq!(a.to_json(), run(&config).unwrap().to_json());
    }

    #[test]
    fn literal_sums_detect_wrong_values() {
        let g = Graph::complete(3).unwrap();
        let sigma = Coloring::new(vec![1, 1, 2], 2).unwrap();
        assert_eq!(literal_cut(&g, &sigma), 2);
        let gamma = Coloring::new(vec![2, 1, 2], 2).unwrap();
        let c = VertexSet::singleton(0);
        assert_eq!(twice_pc_half_sum(&g, &sigma, &gamma, c), 0);
        let all = g.vertices();
        assert_eq!(twice_pc_half_sum(&g, &sigma, &gamma, all), 2);
    }
}
