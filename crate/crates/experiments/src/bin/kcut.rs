//! `kcut`: exact solver, equilibrium verifier and experiment runner for the
//! max k-cut game.
//!
//! Exit codes: 0 when every check passes, 2 when a counterexample or a
//! failed check is found, 1 on errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use kcut_core::dynamics::{run_best_response, run_coalition_dynamics, Schedule, Terminal};
use kcut_core::equilibrium::{
    all_strong_deviations, audit_minimal_deviation, find_strong_deviation, AuditReport, DeviationCertificate,
    DeviationSearch, Minimality, Pruning,
};
use kcut_core::fixtures::Reconstruction;
use kcut_core::io::{parse_graph, GraphDocument};
use kcut_core::solver::{enumerate_optimal, max_cut_exact, Budget};
use kcut_core::{Coloring, Graph};
use kcut_experiments::config::FileConfig;
use kcut_experiments::theorems::Mode;
use kcut_experiments::{dynamics_sweep, er, figure1, fuzz, sweep, table1, theorems, triangle, ExperimentReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "kcut", version, about = "Exact experiments on the max k-cut game")]
struct Cli {
    /// TOML file with experiment settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for reports and CSV files [default: results]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Init {
    Mono,
    Random,
    File,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DynamicsMode {
    Br,
    Coalition,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum k-cut of a graph, optionally with every optimal coloring.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        enumerate_all: bool,
        /// List one coloring per color-relabeling class.
        #[arg(long)]
        canonical: bool,
        /// Node budget for the branch and bound.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Searches for a strong deviation by at most q players.
    VerifyQse {
        #[arg(long)]
        graph: PathBuf,
        /// Coloring file; defaults to the coloring embedded in the graph file.
        #[arg(long, conflicts_with = "from_solver")]
        coloring: Option<PathBuf>,
        /// Check an optimal coloring found by the exact solver.
        #[arg(long)]
        from_solver: bool,
        #[arg(long)]
        k: Option<usize>,
        /// Largest coalition [default: min(7, n)]
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=3))]
        pruning: u8,
        #[arg(long)]
        emit_certificate: Option<PathBuf>,
    },
    /// Audits minimal strong deviations, for one coloring or exhaustively.
    Audit {
        /// Audit the given instance instead of sweeping all small graphs.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        coloring: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<usize>>,
    },
    /// Runs improvement dynamics on one graph, or the random-instance sweep.
    Dynamics {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = Init::Mono)]
        init: Init,
        /// Starting coloring for `--init file`; defaults to the graph file's.
        #[arg(long)]
        coloring: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = DynamicsMode::Br)]
        mode: DynamicsMode,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        trace_out: Option<PathBuf>,
        /// Number of random instances in the sweep.
        #[arg(long)]
        instances: Option<usize>,
    },
    /// Regression on the six-player worked example.
    Figure1 {
        #[arg(long, value_enum)]
        reconstruction: Option<ReconstructionArg>,
    },
    /// Worst-case P_C table for small coalitions.
    Table1,
    /// Checks that every graph with n vertices and m edges has a triangle.
    TriangleClaim {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Checks that optimal colorings admit no strong deviation.
    VerifyTheorems {
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        max_n: Option<usize>,
        /// Number of random graphs.
        #[arg(long, conflicts_with = "exhaustive")]
        samples: Option<usize>,
        /// Every labeled graph up to max-n.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<usize>>,
    },
    /// Deviation sizes between optimal colorings of random graphs.
    ErExperiment {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        avg_degrees: Option<Vec<f64>>,
        #[arg(long)]
        graphs_per_degree: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Random and exhaustive checks of the cut accounting identities.
    IdentityFuzz {
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        max_k: Option<usize>,
        #[arg(long)]
        exhaustive_max_n: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReconstructionArg {
    V1v3,
    V1v6,
    Both,
}

struct Context_ {
    file: FileConfig,
    seed: Option<u64>,
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    if let Some(jobs) = cli.jobs.or(file.jobs) {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let ctx = Context_ {
        seed: cli.seed.or(file.seed),
        out_dir: cli.out_dir.clone().or_else(|| file.out_dir.clone()).unwrap_or_else(|| PathBuf::from("results")),
        file,
    };
    match cli.command {
        Command::Solve { graph, k, enumerate_all, canonical, budget, out } => {
            solve(&graph, k, enumerate_all, canonical, budget, out.as_deref())
        }
        Command::VerifyQse { graph, coloring, from_solver, k, q, pruning, emit_certificate } => {
            verify_qse(&graph, coloring.as_deref(), from_solver, k, q, pruning, emit_certificate.as_deref())
        }
        Command::Audit { graph: Some(graph), coloring, k, .. } => audit_instance(&ctx, &graph, coloring.as_deref(), k),
        Command::Audit { graph: None, max_n, ks, .. } => {
            let mut config = ctx.file.audit.clone();
            set(&mut config.max_n, max_n);
            set(&mut config.ks, ks);
            finish(&ctx, sweep::run(&config)?)
        }
        Command::Dynamics { graph: Some(graph), k, init, coloring, mode, q, max_steps, trace_out, .. } => {
            dynamics_instance(&ctx, &graph, k, init, coloring.as_deref(), mode, q, max_steps, trace_out.as_deref())
        }
        Command::Dynamics { graph: None, instances, .. } => {
            let mut config = ctx.file.dynamics.clone();
            set(&mut config.instances, instances);
            set(&mut config.seed, ctx.seed);
            finish(&ctx, dynamics_sweep::run(&config)?)
        }
        Command::Figure1 { reconstruction } => {
            let mut config = ctx.file.figure1.clone();
            match reconstruction {
                Some(ReconstructionArg::V1v3) => config.reconstructions = vec![Reconstruction::V1V3],
                Some(ReconstructionArg::V1v6) => config.reconstructions = vec![Reconstruction::V1V6],
                Some(ReconstructionArg::Both) => config.reconstructions = Reconstruction::ALL.to_vec(),
                None => {}
            }
            let report = figure1::run(&config);
            for check in &report.checks {
                println!("{} {}", if check.pass { "ok  " } else { "FAIL" }, check.name);
            }
            finish(&ctx, report)
        }
        Command::Table1 => {
            let report = table1::run()?;
            print!("{}", table1::render(&report));
            finish(&ctx, report)
        }
        Command::TriangleClaim { n, m } => {
            let mut config = ctx.file.triangle.clone();
            set(&mut config.n, n);
            set(&mut config.m, m);
            finish(&ctx, triangle::run(&config)?)
        }
        Command::VerifyTheorems { mode, max_n, samples, exhaustive, ks } => {
            let mut config = ctx.file.theorems.resolve(mode);
            set(&mut config.max_n, max_n);
            if samples.is_some() {
                config.samples = samples;
            }
            if exhaustive {
                config.samples = None;
            }
            set(&mut config.ks, ks);
            set(&mut config.seed, ctx.seed);
            finish(&ctx, theorems::run(&config)?)
        }
        Command::ErExperiment { n, avg_degrees, graphs_per_degree, k, budget } => {
            let mut config = ctx.file.er.clone();
            set(&mut config.n, n);
            set(&mut config.avg_degrees, avg_degrees);
            set(&mut config.graphs_per_degree, graphs_per_degree);
            set(&mut config.k, k);
            set(&mut config.budget, budget);
            set(&mut config.seed, ctx.seed);
            let report = er::run(&config)?;
            let csv_path = ctx.out_dir.join("er_histogram.csv");
            fs::create_dir_all(&ctx.out_dir)?;
            fs::write(&csv_path, er::histogram_csv(&report)?)?;
            println!("histogram: {}", csv_path.display());
            finish(&ctx, report)
        }
        Command::IdentityFuzz { count, max_n, max_k, exhaustive_max_n } => {
            let mut config = ctx.file.fuzz.clone();
            set(&mut config.count, count);
            set(&mut config.max_n, max_n);
            set(&mut config.max_k, max_k);
            set(&mut config.exhaustive_max_n, exhaustive_max_n);
            set(&mut config.seed, ctx.seed);
            finish(&ctx, fuzz::run(&config)?)
        }
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn finish(ctx: &Context_, report: ExperimentReport) -> Result<u8> {
    let path = report.write(&ctx.out_dir)?;
    println!("{}", report.summary());
    for check in report.failed_checks() {
        println!("  failed: {} (expected {}, got {})", check.name, check.expected, check.actual);
    }
    println!("report: {}", path.display());
    Ok(report.exit_code() as u8)
}

fn load_graph(path: &Path) -> Result<GraphDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn palette(doc: &GraphDocument, k: Option<usize>) -> Result<usize> {
    k.or(doc.k).ok_or_else(|| anyhow!("number of colors unknown: pass --k or put `k` in the graph file"))
}

/// Reads `{"k": .., "sigma": [..]}` or whitespace-separated colors.
fn load_coloring(path: &Path, k: Option<usize>) -> Result<Coloring> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        return Ok(serde_json::from_str(&text)?);
    }
    let colors: Vec<u8> = text.split_whitespace().map(str::parse).collect::<Result<_, _>>()?;
    let k = k.unwrap_or_else(|| colors.iter().copied().max().unwrap_or(1) as usize);
    Ok(Coloring::new(colors, k)?)
}

fn instance_coloring(doc: &GraphDocument, coloring: Option<&Path>, k: Option<usize>) -> Result<Coloring> {
    let sigma = match coloring {
        Some(path) => load_coloring(path, k.or(doc.k))?,
        None => doc.coloring(k)?.ok_or_else(|| anyhow!("no coloring: pass --coloring or add a sigma line"))?,
    };
    if sigma.len() != doc.graph.n() {
        bail!("coloring has {} entries for {} vertices", sigma.len(), doc.graph.n());
    }
    Ok(sigma)
}

fn emit(value: &impl Serialize, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SolveOutput {
    n: usize,
    m: usize,
    k: usize,
    best_value: usize,
    exhausted: bool,
    nodes: u64,
    canonical: bool,
    count_labeled: Option<u64>,
    witnesses: Vec<Coloring>,
}

fn solve(
    path: &Path,
    k: Option<usize>,
    enumerate_all: bool,
    canonical: bool,
    budget: Option<u64>,
    out: Option<&Path>,
) -> Result<u8> {
    let doc = load_graph(path)?;
    let k = palette(&doc, k)?;
    let budget = budget.map(Budget).unwrap_or_default();
    let g = &doc.graph;
    let opt = if enumerate_all { enumerate_optimal(g, k, budget)? } else { max_cut_exact(g, k, budget)? };
    let witnesses = if canonical || !enumerate_all { opt.witnesses.clone() } else { opt.labeled_witnesses() };
    emit(
        &SolveOutput {
            n: g.n(),
            m: g.m(),
            k,
            best_value: opt.best_value,
            exhausted: opt.exhausted,
            nodes: opt.nodes,
            canonical: canonical || !enumerate_all,
            count_labeled: opt.count_labeled,
            witnesses,
        },
        out,
    )?;
    Ok(0)
}

/// A search result with the instance it refers to.
#[derive(Serialize)]
struct CertificateFile<'a> {
    n: usize,
    edges: Vec<(usize, usize)>,
    sigma: &'a Coloring,
    q: usize,
    result: &'a DeviationSearch,
}

fn verify_qse(
    path: &Path,
    coloring: Option<&Path>,
    from_solver: bool,
    k: Option<usize>,
    q: Option<usize>,
    pruning: u8,
    emit_certificate: Option<&Path>,
) -> Result<u8> {
    let doc = load_graph(path)?;
    let g = &doc.graph;
    let sigma = if from_solver {
        let opt = max_cut_exact(g, palette(&doc, k)?, Budget::UNLIMITED)?;
        opt.witnesses.into_iter().next().ok_or_else(|| anyhow!("solver returned no witness"))?
    } else {
        instance_coloring(&doc, coloring, k)?
    };
    let q = q.unwrap_or(g.n().min(7)).max(1);
    let pruning = Pruning::from_level(pruning).expect("range checked by clap");
    let result = find_strong_deviation(g, &sigma, q, pruning)?;
    let file = CertificateFile { n: g.n(), edges: g.edges().collect(), sigma: &sigma, q, result: &result };
    emit(&file, emit_certificate)?;
    match &result {
        DeviationSearch::Found(cert) => {
            eprintln!("strong deviation by {} player(s): coloring is not a {q}-strong equilibrium", cert.coalition.len());
            Ok(2)
        }
        DeviationSearch::Absent(_) => {
            eprintln!("no strong deviation by at most {q} players");
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct InstanceAudit {
    certificate: DeviationCertificate,
    audit: AuditReport,
}

fn audit_instance(ctx: &Context_, path: &Path, coloring: Option<&Path>, k: Option<usize>) -> Result<u8> {
    let doc = load_graph(path)?;
    let g = &doc.graph;
    let sigma = instance_coloring(&doc, coloring, k)?;
    let mut audits = Vec::new();
    for cert in all_strong_deviations(g, &sigma, g.n().max(1))? {
        if cert.minimal == Minimality::Yes {
            let audit = audit_minimal_deviation(g, &sigma, &cert)?;
            audits.push(InstanceAudit { certificate: cert, audit });
        }
    }
    let violations: usize = audits.iter().map(|a| a.audit.violations.len()).sum();
    fs::create_dir_all(&ctx.out_dir)?;
    let out = ctx.out_dir.join("audit_instance.json");
    emit(&audits, Some(&out))?;
    println!("{} minimal strong deviations audited, {violations} violations", audits.len());
    println!("report: {}", out.display());
    Ok(if violations == 0 { 0 } else { 2 })
}

#[allow(clippy::too_many_arguments)]
fn dynamics_instance(
    ctx: &Context_,
    path: &Path,
    k: Option<usize>,
    init: Init,
    coloring: Option<&Path>,
    mode: DynamicsMode,
    q: usize,
    max_steps: Option<usize>,
    trace_out: Option<&Path>,
) -> Result<u8> {
    let doc = load_graph(path)?;
    let g: &Graph = &doc.graph;
    let seed = ctx.seed.unwrap_or(0);
    let sigma0 = match init {
        Init::Mono => Coloring::monochromatic(g.n(), palette(&doc, k)?)?,
        Init::Random => {
            let k = palette(&doc, k)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Coloring::new((0..g.n()).map(|_| rng.gen_range(1..=k as u8)).collect(), k)?
        }
        Init::File => instance_coloring(&doc, coloring, k)?,
    };
    let max_steps = max_steps.unwrap_or(10 * g.m() + 10);
    let trace = match mode {
        DynamicsMode::Br => run_best_response(g, &sigma0, Schedule::RoundRobin, max_steps)?,
        DynamicsMode::Coalition => run_coalition_dynamics(g, &sigma0, q, max_steps)?,
    };
    println!("{} steps, terminal {:?}, final {:?}", trace.steps.len(), trace.terminal, trace.final_coloring.as_slice());
    if let Some(c) = trace.relabeled_cycle {
        println!("state repeats up to relabeling: step {} = step {}", c.repeat_at, c.first_seen);
    }
    match trace_out {
        Some(out) => emit(&trace, Some(out))?,
        None => {
            fs::create_dir_all(&ctx.out_dir)?;
            emit(&trace, Some(&ctx.out_dir.join("trace.json")))?;
        }
    }
    Ok(if trace.terminal == Terminal::CycleDetected { 2 } else { 0 })
}
