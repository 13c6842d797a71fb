//! Acceptance suite: one PASS/FAIL line per criterion, with the time taken.
//!
//! Runs with the default experiment settings and fails if any criterion
//! fails or exceeds its time limit.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use kcut_core::fixtures::Reconstruction;
use kcut_experiments::theorems::{Mode, TheoremsConfig};
use kcut_experiments::{dynamics_sweep, er, figure1, fuzz, sweep, table1, theorems, triangle, ExperimentReport};

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_report(report: &ExperimentReport, required: &[&str]) -> Outcome {
    let mut problems: Vec<String> = Vec::new();
    for name in required {
        match report.check_named(name) {
            Some(c) if c.pass => {}
            Some(c) => problems.push(format!("{name}: expected {}, got {}", c.expected, c.actual)),
            None => problems.push(format!("{name}: missing")),
        }
    }
    if required.is_empty() {
        problems.extend(report.failed_checks().map(|c| format!("{}: expected {}, got {}", c.name, c.expected, c.actual)));
        if !report.counterexamples.is_empty() {
            problems.push(format!("{} counterexamples", report.counterexamples.len()));
        }
    }
    let checks = if required.is_empty() { report.checks.len() } else { required.len() };
    Outcome {
        pass: problems.is_empty(),
        detail: if problems.is_empty() { format!("{checks} checks") } else { problems.join("; ") },
    }
}

struct Suite {
    failures: usize,
}

impl Suite {
    fn run(&mut self, id: usize, title: &str, limit: Duration, body: impl FnOnce() -> Result<Outcome>) {
        let start = Instant::now();
        let outcome = body().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e:#}") });
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = outcome.pass && in_time;
        if !pass {
            self.failures += 1;
        }
        let timing = if in_time { String::new() } else { format!(", over the {limit:?} limit") };
        println!(
            "{} {id:>2}. {title} ({:.2?}{timing}): {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed,
            outcome.detail
        );
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn main() -> ExitCode {
    let mut suite = Suite { failures: 0 };

    suite.run(1, "worked example regression", secs(1), || {
        let config = figure1::Figure1Config { reconstructions: vec![Reconstruction::V1V3], negative_control: true };
        Ok(from_report(&figure1::run(&config), &[]))
    });

    suite.run(2, "small-coalition P_C table", secs(1), || {
        let report = table1::run()?;
        ensure!(report.records.len() == 25, "expected 25 cells, got {}", report.records.len());
        Ok(from_report(&report, &[]))
    });

    suite.run(3, "5-vertex 7-edge graphs contain a triangle", secs(1), || {
        let report = triangle::run(&triangle::TriangleConfig::default())?;
        ensure!(report.check_named("labeled graphs with n=5, m=7").is_some_and(|c| c.actual == 120));
        Ok(from_report(&report, &[]))
    });

    suite.run(4, "cut identity and symmetry fuzz", secs(30), || {
        let report = fuzz::run(&fuzz::FuzzConfig::default())?;
        ensure!(report.stats["random_instances"] == 10_000);
        Ok(from_report(&report, &[]))
    });

    suite.run(5, "optimal colorings are 7-strong equilibria (200 random graphs)", secs(30 * 60), || {
        let config = TheoremsConfig::for_mode(Mode::Theorem3);
        ensure!(config.samples == Some(200) && config.max_n == 12 && config.ks == [2, 3]);
        Ok(from_report(&theorems::run(&config)?, &[]))
    });

    suite.run(6, "optimal 2-colorings are strong equilibria (all graphs, n <= 6)", secs(10 * 60), || {
        let config = TheoremsConfig::for_mode(Mode::K2);
        ensure!(config.samples.is_none() && config.max_n == 6 && config.ks == [2]);
        Ok(from_report(&theorems::run(&config)?, &[]))
    });

    suite.run(7, "optimal 3-colorings are strong equilibria (all graphs, n <= 6)", secs(60 * 60), || {
        let config = TheoremsConfig::for_mode(Mode::Conjecture);
        ensure!(config.samples.is_none() && config.max_n == 6 && config.ks == [3]);
        Ok(from_report(&theorems::run(&config)?, &[]))
    });

    let mut audit = None;
    suite.run(8, "pruning levels agree with the unpruned search (n <= 6, k <= 3)", secs(30 * 60), || {
        let report = audit.insert(sweep::run(&sweep::SweepConfig::default())?);
        Ok(from_report(
            report,
            &["L1 existence answers agree with L0", "L2 existence answers agree with L0", "L3 existence answers agree with L0"],
        ))
    });

    suite.run(9, "minimal deviation audits from the same sweep", secs(30 * 60), || {
        let report = audit.as_ref().ok_or_else(|| anyhow::anyhow!("the sweep did not complete"))?;
        ensure!(report.stats.get("minimal_deviations_audited").is_some_and(|&m| m > 0), "no minimal deviations audited");
        Ok(from_report(
            report,
            &[
                "minimal deviations violating cut_lower_bound",
                "minimal deviations violating size_at_least_two",
                "minimal deviations violating colors_preserved",
                "minimal deviations violating neighbor_color",
            ],
        ))
    });

    suite.run(10, "improvement dynamics on 1000 random instances", secs(5 * 60), || {
        let config = dynamics_sweep::DynamicsSweepConfig::default();
        ensure!(config.instances == 1000 && config.max_n == 20 && config.max_k == 4);
        Ok(from_report(&dynamics_sweep::run(&config)?, &[]))
    });

    suite.run(11, "random-graph experiment end to end", secs(60 * 60), || {
        let report = er::run(&er::ErConfig::default())?;
        let dir = tempfile::tempdir()?;
        let path = dir.path().join("er_histogram.csv");
        std::fs::write(&path, er::histogram_csv(&report)?)?;
        let csv = std::fs::read_to_string(&path)?;
        ensure!(csv.starts_with("size,avg_degree_5,avg_degree_10,all\n"), "unexpected CSV header");
        ensure!(csv.lines().count() == 1 + 16, "expected 16 histogram rows");
        Ok(from_report(&report, &[]))
    });

    println!("{} criteria failed", suite.failures);
    if suite.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
