//! Exhaustive check that every labeled graph with `n` vertices and `m`
//! edges contains a triangle, plus the extremal facts around it at `n = 5`.

use std::collections::BTreeSet;

use anyhow::Result;
use kcut_core::graph::{enumerate_graphs, Graph};
use serde::{Deserialize, Serialize};

use crate::report::{Counterexample, ExperimentReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TriangleConfig {
    pub n: usize,
    pub m: usize,
}

impl Default for TriangleConfig {
    fn default() -> Self {
        TriangleConfig { n: 5, m: 7 }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Edge sets of every labeled copy of `h` on its own vertex set.
fn labeled_copies(h: &Graph) -> BTreeSet<Vec<(usize, usize)>> {
    let mut perm: Vec<usize> = (0..h.n()).collect();
    let mut out = BTreeSet::new();
    loop {
        out.insert(h.relabel(&perm).expect("a permutation").edges().collect());
        // Next permutation in lexicographic order.
        let Some(i) = (1..perm.len()).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return out;
        };
        let j = (i..perm.len()).rev().find(|&j| perm[j] > perm[i - 1]).expect("exists");
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

fn triangle_free(n: usize, m: usize) -> Result<Vec<Graph>> {
    Ok(enumerate_graphs(n, m)?.filter(|g| !g.contains_triangle()).collect())
}

pub fn run(config: &TriangleConfig) -> Result<ExperimentReport> {
    let TriangleConfig { n, m } = *config;
    let mut report = ExperimentReport::new("triangle-claim", config);
    let pairs = (n * n.saturating_sub(1) / 2) as u64;
    let mut total = 0u64;
    let mut with_triangle = 0u64;
    for g in enumerate_graphs(n, m)? {
        total += 1;
        if g.contains_triangle() {
            with_triangle += 1;
        } else {
            report.counterexamples.push(Counterexample::new("triangle_free_graph", &g, None, format!("n={n}, m={m}")));
        }
    }
    report.stat("graphs", total);
    report.stat("graphs_with_triangle", with_triangle);
    report.check(format!("labeled graphs with n={n}, m={m}"), binomial(pairs, m as u64), total);
    report.check(format!("graphs with n={n}, m={m} containing a triangle"), total, with_triangle);

    if n == 5 {
        let max_free = (0..=pairs as usize).filter(|&e| triangle_free(5, e).is_ok_and(|v| !v.is_empty())).max();
        report.check("most edges in a triangle-free graph on 5 vertices", Some(5 * 5 / 4), max_free);
        let at_six: BTreeSet<Vec<(usize, usize)>> =
            triangle_free(5, 6)?.iter().map(|g| g.edges().collect()).collect();
        let bipartite = labeled_copies(&Graph::complete_bipartite(2, 3)?);
        report.check("triangle-free graphs with n=5, m=6", bipartite.len(), at_six.len());
        report.check("triangle-free graphs with n=5, m=6 are the labeled K_{2,3}", true, at_six == bipartite);
        let complete: Vec<Graph> = enumerate_graphs(5, 10)?.collect();
        report.check("graphs with n=5, m=10", 1, complete.len());
        report.check("K5 contains a triangle", true, complete.iter().all(Graph::contains_triangle));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_vertices_seven_edges() {
        let report = run(&TriangleConfig::default()).unwrap();
        assert!(report.passed(), "{:?}", report.failed_checks().collect::<Vec<_>>());
        assert_eq!(report.stats["graphs"], 120);
        assert_eq!(report.stats["graphs_with_triangle"], 120);
    }

    #[test]
    fn six_edges_admit_bipartite_graphs() {
        let report = run(&TriangleConfig { n: 5, m: 6 }).unwrap();
        assert_eq!(report.counterexamples.len(), 10);
        assert_eq!(report.exit_code(), 2);
    }

    #[test]
    fn copies_of_k23() {
        assert_eq!(labeled_copies(&Graph::complete_bipartite(2, 3).unwrap()).len(), 10);
        assert_eq!(labeled_copies(&Graph::path(3).unwrap()).len(), 3);
    }
}
