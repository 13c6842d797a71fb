//! Regression on the six-player worked example.

use kcut_core::equilibrium::{best_response, is_nash};
use kcut_core::fixtures::{color_name, figure1, Figure1, Reconstruction, RED};
use kcut_core::game::{self, Color};
use kcut_core::graph::Graph;
use kcut_core::VertexSet;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::report::ExperimentReport;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Figure1Config {
    pub reconstructions: Vec<Reconstruction>,
    pub negative_control: bool,
}

impl Default for Figure1Config {
    fn default() -> Self {
        Figure1Config { reconstructions: Reconstruction::ALL.to_vec(), negative_control: true }
    }
}

/// Cut value of γ under each reconstruction; the two differ because the
/// extra edge `{v1, v6}` becomes bichromatic under γ.
pub fn expected_gamma_cut(reconstruction: Reconstruction) -> usize {
    match reconstruction {
        Reconstruction::V1V3 => 7,
        Reconstruction::V1V6 => 8,
    }
}

fn names(fig: &Figure1, set: VertexSet) -> Vec<String> {
    set.iter().map(|v| fig.names[v].clone()).collect()
}

fn color_names(colors: impl IntoIterator<Item = Color>) -> Vec<String> {
    colors.into_iter().map(color_name).collect()
}

/// Evaluates every listed quantity on `fig`, recording checks prefixed by
/// `label`. Returns whether all of them passed.
pub fn check_fixture(report: &mut ExperimentReport, label: &str, fig: &Figure1, gamma_cut: usize) -> bool {
    let g = &fig.graph;
    let (sigma, gamma) = (&fig.sigma, &fig.gamma);
    let mut ok = true;
    let mut check = |name: &str, expected: Value, actual: Value| {
        ok &= report.check(format!("{label}: {name}"), expected, actual);
    };
    check("S(sigma)", json!(8), json!(game::cut_value(g, sigma).unwrap()));
    check("SW(sigma)", json!(16), json!(game::social_welfare(g, sigma).unwrap()));
    check("payoffs", json!([2, 2, 3, 4, 3, 2]), json!(game::payoffs(g, sigma).unwrap()));

    let c = game::deviating_set(sigma, gamma).unwrap();
    check("deviating set", json!(["v1", "v3", "v5"]), json!(names(fig, c)));
    check(
        "K_C(sigma)",
        json!(["red", "green"]),
        json!(color_names(game::coalition_colors(sigma, c).unwrap())),
    );
    check(
        "C_red(sigma)",
        json!(["v1", "v3"]),
        json!(names(fig, game::color_class(sigma, c, RED).unwrap())),
    );
    check("S(gamma)", json!(gamma_cut), json!(game::cut_value(g, gamma).unwrap()));
    let strong = !c.is_empty()
        && c.iter().all(|v| game::payoff(g, gamma, v).unwrap() > game::payoff(g, sigma, v).unwrap());
    check("deviation is strong", json!(false), json!(strong));

    let (color, gain) = best_response(g, sigma, 0).unwrap();
    check("best response of v1", json!(["green", 1]), json!([color_name(color), gain]));
    check("sigma is a Nash equilibrium", json!(false), json!(is_nash(g, sigma).unwrap().is_nash));
    ok
}

/// The canonical fixture with the cut edge `{v1, v2}` removed.
pub fn corrupted_fixture() -> Figure1 {
    let mut fig = figure1(Reconstruction::V1V3);
    let edges = fig.graph.edges().filter(|&e| e != (0, 1));
    fig.graph = Graph::from_edges(6, edges).expect("subset of valid edges");
    fig
}

pub fn run(config: &Figure1Config) -> ExperimentReport {
    let mut report = ExperimentReport::new("figure1", config);
    report.note("v1v3 is the canonical reconstruction; v1v6 is the alternative completion of the edge list");
    report.note("S(gamma) is 7 under v1v3 and 8 under v1v6; every other quantity agrees");
    for &rec in &config.reconstructions {
        check_fixture(&mut report, rec.label(), &figure1(rec), expected_gamma_cut(rec));
    }
    if config.negative_control {
        let mut scratch = ExperimentReport::new("figure1-corrupted", &());
        check_fixture(&mut scratch, "corrupted", &corrupted_fixture(), 7);
        let flagged = scratch.check_named("corrupted: S(sigma)").is_some_and(|c| !c.pass);
        report.check("negative control: corrupted fixture flags S(sigma) != 8", true, flagged);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let report = run(&Figure1Config::default());
        assert!(report.passed(), "{:#?}", report.failed_checks().collect::<Vec<_>>());
        assert_eq!(report.checks.len(), 2 * 10 + 1);
    }

    #[test]
    fn corrupted_fixture_fails_cut_check() {
        let mut report = ExperimentReport::new("t", &());
        assert!(!check_fixture(&mut report, "bad", &corrupted_fixture(), 7));
        assert_eq!(report.check_named("bad: S(sigma)").unwrap().actual, json!(7));
    }
}
