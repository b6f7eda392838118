//! Acceptance suites. Each criterion runs at a `full` level with the
//! parameters it is specified with and at a reduced `fast` level for quick
//! checks; both report a single pass/fail line.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use cldiam::baseline::{delta_stepping, geometric_grid, iterated_sssp_lower, sssp_diameter_upper, tune_delta};
use cldiam::graph::{self, ceil_log2};
use cldiam::{
    approximate_diameter, cluster, cluster2, oracle, Algorithm, ClusterOptions, ClusteringResult, DeltaInit,
    DiameterOptions, Graph, Rng, WeightModel,
};
use clap::Parser;

use crate::args::{Cli, Command, Level};
use crate::commands::{cmd_compare, cmd_diam, cmd_gen, cmd_oracle, cmd_sssp, random_source};
use crate::corpus::{random_graph, small_corpus};
use crate::error::{CliError, CliResult};

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} ({}): {} [{:.1}s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "delta-stepping exactness"),
    (2, "conservative estimate"),
    (3, "approximation quality"),
    (4, "round and work advantage"),
    (5, "final delta within 4 R(tau)"),
    (6, "cluster count envelopes"),
    (7, "initial delta experiment"),
    (8, "safety invariants"),
    (9, "determinism"),
    (10, "generator fidelity and sandwich"),
];

/// Wall-clock allowance of each criterion at the full level.
fn time_limit(id: u8) -> Option<Duration> {
    let secs = match id {
        1 | 5 => 60,
        3 | 6 | 7 => 300,
        4 => 600,
        _ => return None,
    };
    Some(Duration::from_secs(secs))
}

/// Runs the selected criteria (all if `only` is empty), handing each
/// outcome to `report` as soon as it is known.
pub fn run_suites(level: Level, only: &[u8], mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .filter(|(id, _)| only.is_empty() || only.contains(id))
        .map(|&(id, _)| {
            let outcome = run_criterion(id, level);
            report(&outcome);
            outcome
        })
        .collect()
}

pub fn run_criterion(id: u8, level: Level) -> Outcome {
    let title = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    let start = Instant::now();
    let result = match id {
        1 => delta_stepping_exactness(level),
        2 => conservative_estimate(level),
        3 => approximation_quality(level),
        4 => round_work_advantage(level),
        5 => final_delta_bound(level),
        6 => cluster_count_envelopes(level),
        7 => initial_delta_experiment(level),
        8 => safety_invariants(level),
        9 => determinism(level),
        10 => generator_fidelity(level),
        _ => Err(CliError::usage(format!("no criterion {id}"))),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok((passed, detail)) => (passed, detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if let (Level::Full, Some(limit)) = (level, time_limit(id)) {
        if elapsed > limit {
            passed = false;
            detail.push_str(&format!("; exceeded the {}s limit", limit.as_secs()));
        }
    }
    Outcome { id, title, passed, detail, elapsed }
}

type Check = CliResult<(bool, String)>;

fn pick<T>(level: Level, fast: T, full: T) -> T {
    match level {
        Level::Fast => fast,
        Level::Full => full,
    }
}

fn uniform(g: &Graph, seed: u64) -> Graph {
    graph::assign_weights(g, WeightModel::Uniform, &Rng::new(seed)).expect("uniform is valid")
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        (values[k / 2 - 1] + values[k / 2]) / 2.0
    }
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn options(algorithm: Algorithm, delta_init: DeltaInit) -> DiameterOptions {
    DiameterOptions {
        algorithm,
        cluster: ClusterOptions { delta_init, budget: false },
        ..Default::default()
    }
}

const MIXED_MODELS: [WeightModel; 4] = [
    WeightModel::Uniform,
    WeightModel::TwoPoint { p_big: 0.1, small: 1e-3, big: 1.0 },
    WeightModel::AsGiven,
    WeightModel::TwoPoint { p_big: 0.5, small: 0.25, big: 4.0 },
];

fn delta_stepping_exactness(level: Level) -> Check {
    let graphs = pick(level, 10u64, 50);
    let max_n = pick(level, 500, 2000);
    let mut runs = 0;
    let mut mismatches = Vec::new();
    for i in 0..graphs {
        let n = 20 + (i as usize * 389) % (max_n - 19);
        let pieces = if i % 5 == 4 { 2 } else { 1 };
        let g = random_graph(n, n / 2, pieces, MIXED_MODELS[i as usize % 4], i);
        let source = random_source(n, i);
        let reference = oracle::dijkstra(&g, source);
        let mean = g.mean_weight().unwrap_or(1.0);
        for delta in [g.min_weight().unwrap_or(1.0), mean, 10.0 * mean] {
            runs += 1;
            if delta_stepping(&g, source, delta)?.dist != reference {
                mismatches.push(format!("graph {i} delta {delta}"));
            }
        }
    }
    Ok((
        mismatches.is_empty(),
        format!("{runs} runs on {graphs} graphs, {} mismatches {:?}", mismatches.len(), mismatches),
    ))
}

fn conservative_estimate(level: Level) -> Check {
    let seeds = pick(level, 3u64, 10);
    let mut runs = 0;
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    for (name, g) in small_corpus(level) {
        let exact = oracle::exact_diameter(&g)?;
        let tau = 4.min(g.node_count());
        for algorithm in [Algorithm::Cluster, Algorithm::Cluster2] {
            for seed in 0..seeds {
                let est = approximate_diameter(&g, tau, &Rng::new(seed), &options(algorithm, DeltaInit::MeanWeight))?;
                runs += 1;
                worst = worst.min(est.phi_approx / exact.max(f64::MIN_POSITIVE));
                if est.phi_approx < exact {
                    failures.push(format!("{name} {algorithm:?} seed {seed}"));
                }
            }
        }
    }
    Ok((
        failures.is_empty(),
        format!("{runs} runs, smallest phi/exact {worst:.4}, violations {failures:?}"),
    ))
}

fn approximation_quality(level: Level) -> Check {
    let seeds = pick(level, 5u64, 10);
    let graphs = [
        (pick(level, "mesh(32)", "mesh(64)"), graph::mesh(pick(level, 32, 64))?),
        (pick(level, "R-MAT(9)", "R-MAT(12)"), graph::rmat(pick(level, 9, 12), &Rng::new(1))?),
    ];
    let tau = 16;
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, base) in &graphs {
        let mut ratios = Vec::new();
        let mut ratios_mean_init = Vec::new();
        for seed in 0..seeds {
            let g = uniform(base, 100 + seed);
            let exact = oracle::exact_diameter(&g)?;
            let est = approximate_diameter(&g, tau, &Rng::new(seed), &options(Algorithm::Cluster, DeltaInit::MinWeight))?;
            ratios.push(est.phi_approx / exact);
            let est = approximate_diameter(&g, tau, &Rng::new(seed), &options(Algorithm::Cluster, DeltaInit::MeanWeight))?;
            ratios_mean_init.push(est.phi_approx / exact);
        }
        let max = max_of(&ratios);
        let med = median(&mut ratios);
        passed &= med <= 1.5 && max <= 2.5;
        parts.push(format!(
            "{name}: median {med:.3} max {max:.3} (mean-weight start: median {:.3})",
            median(&mut ratios_mean_init)
        ));
    }
    Ok((passed, format!("tau {tau}, min-weight start, {seeds} seeds; {}", parts.join("; "))))
}

fn round_work_advantage(level: Level) -> Check {
    let seeds = pick(level, 5u64, 10);
    let needed = pick(level, 4, 8);
    let base = graph::mesh(pick(level, 64, 128))?;
    let tau = 16;
    let (mut round_wins, mut work_wins) = (0, 0);
    let mut samples = Vec::new();
    for seed in 0..seeds {
        let g = uniform(&base, seed);
        let est = approximate_diameter(&g, tau, &Rng::new(seed), &DiameterOptions::default())?;
        let source = random_source(g.node_count(), seed);
        let grid = geometric_grid(g.mean_weight().unwrap_or(1.0), -6, 8);
        let tuned = tune_delta(&g, source, &grid)?;
        let (cl, ds) = (est.metrics, tuned.best.metrics);
        round_wins += usize::from(cl.rounds < ds.rounds);
        work_wins += usize::from(cl.work() < ds.work());
        if samples.len() < 3 {
            samples.push(format!("{}/{} rounds, {}/{} work", cl.rounds, ds.rounds, cl.work(), ds.work()));
        }
    }
    Ok((
        round_wins >= needed && work_wins >= needed,
        format!(
            "fewer rounds in {round_wins}/{seeds} seeds, less work in {work_wins}/{seeds} (need {needed}); cl-diam vs delta-stepping: {}",
            samples.join(", ")
        ),
    ))
}

fn final_delta_bound(_level: Level) -> Check {
    let graphs = 100u64;
    let mut within = 0;
    for i in 0..graphs {
        let n = 4 + (i as usize * 7) % 9;
        let tau = 1 + (i as usize % 3);
        let g = random_graph(n, (i % 4) as usize, 1, WeightModel::Uniform, 5000 + i);
        let opts = ClusterOptions { delta_init: DeltaInit::MinWeight, budget: false };
        let c = cluster(&g, tau, &Rng::new(i), &opts)?;
        let r = oracle::optimal_cluster_radius(&g, tau)?;
        let delta_end = c.delta_end.expect("cluster reports its final delta");
        within += usize::from(delta_end <= 4.0 * r);
    }
    Ok((within >= 90, format!("{within}/{graphs} runs with delta_end <= 4 R(tau) (need 90)")))
}

fn cluster_count_envelopes(level: Level) -> Check {
    let seeds = pick(level, 20u64, 100);
    let base = graph::mesh(32)?;
    let tau = 4usize;
    let log_n = f64::from(ceil_log2(base.node_count()));
    let bound1 = 32.0 * tau as f64 * log_n * log_n;
    let bound2 = 8.0 * tau as f64 * log_n.powi(4);
    let (mut ok1, mut ok2) = (0u64, 0u64);
    let (mut max1, mut max2) = (0, 0);
    for seed in 0..seeds {
        let g = uniform(&base, seed);
        let c1 = cluster(&g, tau, &Rng::new(seed), &ClusterOptions::default())?;
        let c2 = cluster2(&g, tau, &Rng::new(seed), &ClusterOptions::default())?;
        ok1 += u64::from(c1.cluster_count() as f64 <= bound1);
        ok2 += u64::from(c2.cluster_count() as f64 <= bound2);
        max1 = max1.max(c1.cluster_count());
        max2 = max2.max(c2.cluster_count());
    }
    let need = (seeds * 95).div_ceil(100);
    Ok((
        ok1 >= need && ok2 >= need,
        format!(
            "cluster: {ok1}/{seeds} within {bound1} (max {max1}); cluster2: {ok2}/{seeds} within {bound2} (max {max2}); need {need}"
        ),
    ))
}

fn initial_delta_experiment(level: Level) -> Check {
    let seeds = pick(level, 3u64, 5);
    let base = graph::mesh(pick(level, 48, 128))?;
    let model = WeightModel::TwoPoint { p_big: 0.1, small: 1e-6, big: 1.0 };
    let tau = 16;
    let mut both = 0;
    let mut parts = Vec::new();
    for seed in 0..seeds {
        let g = graph::assign_weights(&base, model, &Rng::new(seed))?;
        let exact = oracle::exact_diameter_with_cap(&g, g.node_count())?;
        let a = approximate_diameter(&g, tau, &Rng::new(seed), &options(Algorithm::Cluster, DeltaInit::MinWeight))?;
        let b = approximate_diameter(&g, tau, &Rng::new(seed), &options(Algorithm::Cluster, DeltaInit::Value(exact)))?;
        let (ra, rb) = (a.phi_approx / exact, b.phi_approx / exact);
        both += usize::from(ra <= 1.1 && rb >= 1.5);
        parts.push(format!("{ra:.4}/{rb:.3}"));
    }
    let need = seeds as usize / 2 + 1;
    Ok((
        both >= need,
        format!(
            "{both}/{seeds} seeds with min-start ratio <= 1.1 and diameter-start ratio >= 1.5 (need {need}); ratios {}",
            parts.join(", ")
        ),
    ))
}

fn check_safety(g: &Graph, c: &ClusteringResult) -> usize {
    let mut violations = 0;
    for &center in &c.centers {
        let dist = oracle::dijkstra(g, center);
        for (u, a) in c.assignment.iter().enumerate() {
            if a.center == center && a.d_orig < dist[u] {
                violations += 1;
            }
        }
    }
    violations
}

fn safety_invariants(level: Level) -> Check {
    let seeds = pick(level, 3u64, 10);
    let mut runs = 0;
    let mut violations = 0;
    let mut where_ = Vec::new();
    for (name, g) in small_corpus(level) {
        let tau = 4.min(g.node_count());
        for seed in 0..seeds {
            for delta_init in [DeltaInit::MinWeight, DeltaInit::MeanWeight] {
                let opts = ClusterOptions { delta_init, budget: false };
                // cluster2 runs contract2 in strict mode: a non-positive
                // rescaled weight would surface here as an error.
                for c in [cluster(&g, tau, &Rng::new(seed), &opts)?, cluster2(&g, tau, &Rng::new(seed), &opts)?] {
                    runs += 1;
                    let v = check_safety(&g, &c);
                    if v > 0 {
                        where_.push(format!("{name} seed {seed}"));
                    }
                    violations += v;
                }
            }
        }
    }
    Ok((
        violations == 0,
        format!("{runs} clusterings, {violations} nodes with d_orig below the true distance {where_:?}; contract2 positivity held"),
    ))
}

fn parse(args: &[&str]) -> CliResult<Command> {
    Cli::try_parse_from(std::iter::once("cldiam").chain(args.iter().copied()))
        .map(|c| c.command)
        .map_err(|e| CliError::usage(e.to_string()))
}

/// Canonical record text of one command run, plus any file it wrote.
fn run_once(cmd: &Command) -> CliResult<(String, Vec<u8>)> {
    Ok(match cmd {
        Command::Gen(a) => {
            let (r, path) = cmd_gen(a)?;
            (r.canonical()?, std::fs::read(path)?)
        }
        Command::Diam(a) => (cmd_diam(a)?.canonical()?, Vec::new()),
        Command::Sssp(a) => (cmd_sssp(a)?.canonical()?, Vec::new()),
        Command::Compare(a) => (cmd_compare(a)?.record.canonical()?, Vec::new()),
        Command::Oracle(a) => (cmd_oracle(a)?.canonical()?, Vec::new()),
        Command::Verify(_) => return Err(CliError::usage("verify is not a record-producing command")),
    })
}

fn determinism(level: Level) -> Check {
    let dir = std::env::temp_dir().join(format!("cldiam-determinism-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let gen_out: PathBuf = dir.join("g.bin");
    let gen_out = gen_out.to_string_lossy().into_owned();
    let mesh = pick(level, "mesh:16", "mesh:32");
    let invocations: [Vec<&str>; 5] = [
        vec!["gen", "--graph", "rmat:8", "--graph-seed", "3", "--out", &gen_out],
        vec!["diam", "--graph", mesh, "--tau", "4", "--seed", "7"],
        vec!["sssp", "--graph", "rmat:8", "--seed", "5"],
        vec!["compare", "--graph", mesh, "--tau", "4", "--seeds", "0..3"],
        vec!["oracle", "--graph", mesh, "--quantity", "hop-radius"],
    ];
    let mut differing = Vec::new();
    for args in &invocations {
        let cmd = parse(args)?;
        if run_once(&cmd)? != run_once(&cmd)? {
            differing.push(args[0]);
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    Ok((
        differing.is_empty(),
        format!("{} commands run twice, differing: {differing:?}", invocations.len()),
    ))
}

fn generator_fidelity(level: Level) -> Check {
    let mut count_errors = Vec::new();
    let bases = [graph::mesh(3)?, random_graph(25, 10, 1, WeightModel::Uniform, 25)];
    for s in 1..=64usize {
        let m = graph::mesh(s)?;
        if (m.node_count(), m.edge_count()) != (s * s, 2 * s * (s - 1)) {
            count_errors.push(format!("mesh({s})"));
        }
        for base in &bases {
            let r = graph::roads_product(base, s)?;
            let expected = (s * base.node_count(), s * base.edge_count() + (s - 1) * base.node_count());
            if (r.node_count(), r.edge_count()) != expected {
                count_errors.push(format!("roads({s})"));
            }
        }
    }
    let mut sandwich_errors = Vec::new();
    let corpus = small_corpus(level);
    for (name, g) in &corpus {
        let exact = oracle::exact_diameter(g)?;
        let source = random_source(g.node_count(), 0);
        let lower = iterated_sssp_lower(g, source, 4)?;
        let upper = sssp_diameter_upper(g, source, g.mean_weight().unwrap_or(1.0))?;
        if !(lower <= exact && exact <= upper) {
            sandwich_errors.push(format!("{name}: {lower} {exact} {upper}"));
        }
    }
    Ok((
        count_errors.is_empty() && sandwich_errors.is_empty(),
        format!(
            "closed forms for S in 1..=64: {} mismatches; sandwich on {} graphs: {} violations {:?}",
            count_errors.len(),
            corpus.len(),
            sandwich_errors.len(),
            sandwich_errors
        ),
    ))
}
