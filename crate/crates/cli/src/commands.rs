use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use cldiam::baseline::{geometric_grid, iterated_sssp_lower, sssp_diameter_upper, tune_delta};
use cldiam::oracle::{self, OracleMethod, OracleReport};
use cldiam::{approximate_diameter, graph, Algorithm, ClusterOptions, DeltaInit, DiameterOptions, Graph, Rng};

use crate::args::{Algo, ClusterArgs, CompareArgs, DiamArgs, GenArgs, GraphArgs, OracleArgs, Quantity, SsspArgs, Switch};
use crate::error::{CliError, CliResult};
use crate::record::{CompareRow, Params, RunRecord};
use crate::source::{materialize, parse_weight_model, weight_model_string, GraphDescriptor, GraphSource};
use crate::tau::default_tau;

/// Environment variable naming the default output directory.
pub const OUT_DIR_VAR: &str = "CLDIAM_OUT_DIR";

/// Header of the comparison CSV.
pub const COMPARE_HEADER: [&str; 6] = ["algo", "seed", "approx_ratio", "time", "rounds", "work"];

pub fn out_dir_from_env() -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_VAR).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn load(args: &GraphArgs) -> CliResult<(Graph, GraphDescriptor)> {
    let spec: GraphSource = args.graph.parse()?;
    let weights = args.weights.as_deref().map(parse_weight_model).transpose()?;
    materialize(&spec, weights, args.graph_seed)
}

fn graph_invocation(d: &GraphDescriptor) -> Vec<String> {
    vec![
        "--graph".into(),
        d.spec.clone(),
        "--weights".into(),
        weight_model_string(&d.weights),
        "--graph-seed".into(),
        d.graph_seed.to_string(),
    ]
}

pub fn parse_delta_init(s: &str) -> CliResult<DeltaInit> {
    match s {
        "min" => Ok(DeltaInit::MinWeight),
        "mean" => Ok(DeltaInit::MeanWeight),
        _ => match s.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(DeltaInit::Value(v)),
            _ => Err(CliError::usage(format!("--delta-init must be min, mean or a positive number, got {s:?}"))),
        },
    }
}

/// Expands a Δ grid description against the graph's mean weight.
pub fn parse_grid(s: &str, mean: f64) -> CliResult<Vec<f64>> {
    let bad = || CliError::usage(format!("cannot parse delta grid {s:?}"));
    let grid = if let Some(rest) = s.strip_prefix("geo:") {
        let (lo, hi) = rest.split_once(':').ok_or_else(bad)?;
        let lo: i32 = lo.parse().map_err(|_| bad())?;
        let hi: i32 = hi.parse().map_err(|_| bad())?;
        geometric_grid(mean, lo, hi)
    } else {
        s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad())).collect::<CliResult<_>>()?
    };
    if grid.is_empty() || grid.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(CliError::usage(format!("delta grid {s:?} must list positive values")));
    }
    Ok(grid)
}

pub fn parse_seeds(s: &str) -> CliResult<Vec<u64>> {
    let bad = || CliError::usage(format!("cannot parse seed list {s:?}"));
    let seeds: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.parse().map_err(|_| bad())?;
        let b: u64 = b.parse().map_err(|_| bad())?;
        (a..b).collect()
    } else if s.trim().is_empty() {
        Vec::new()
    } else {
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<CliResult<_>>()?
    };
    if seeds.is_empty() {
        return Err(CliError::usage("the seed list is empty"));
    }
    Ok(seeds)
}

/// Source node drawn from the seed.
pub fn random_source(n: usize, seed: u64) -> usize {
    Rng::new(seed).substream("source").below(0, 0, n as u64) as usize
}

fn switch(s: Switch) -> &'static str {
    match s {
        Switch::Off => "off",
        Switch::On => "on",
    }
}

fn algo_name(a: Algo) -> &'static str {
    match a {
        Algo::Cluster => "cluster",
        Algo::Cluster2 => "cluster2",
    }
}

fn diameter_options(c: &ClusterArgs) -> CliResult<DiameterOptions> {
    Ok(DiameterOptions {
        algorithm: match c.algo {
            Algo::Cluster => Algorithm::Cluster,
            Algo::Cluster2 => Algorithm::Cluster2,
        },
        cluster: ClusterOptions {
            delta_init: parse_delta_init(&c.delta_init)?,
            budget: c.budget == Switch::On,
        },
        ..Default::default()
    })
}

fn resolve_tau(c: &ClusterArgs, n: usize) -> CliResult<usize> {
    let tau = c.tau.unwrap_or_else(|| default_tau(n, c.max_clusters));
    if tau == 0 || tau > n {
        return Err(CliError::usage(format!("--tau must lie in 1..={n}, got {tau}")));
    }
    Ok(tau)
}

fn cluster_invocation(c: &ClusterArgs, tau: usize) -> Vec<String> {
    vec![
        "--tau".into(),
        tau.to_string(),
        "--algo".into(),
        algo_name(c.algo).into(),
        "--delta-init".into(),
        c.delta_init.clone(),
        "--budget".into(),
        switch(c.budget).into(),
    ]
}

fn exact_report(g: &Graph, cap: usize) -> CliResult<OracleReport> {
    Ok(OracleReport::measure("diameter", OracleMethod::DijkstraApsp, g, || {
        oracle::exact_diameter_with_cap(g, cap)
    })?)
}

fn default_out(out: &Option<PathBuf>, file: &str) -> Option<PathBuf> {
    out.clone().or_else(|| out_dir_from_env().map(|d| d.join(file)))
}

/// Writes the graph and returns its record and the path written.
pub fn cmd_gen(args: &GenArgs) -> CliResult<(RunRecord, PathBuf)> {
    let start = Instant::now();
    let (g, desc) = load(&args.graph)?;
    let stem: String = desc.spec.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '-' }).collect();
    let path = default_out(&args.out, &format!("{stem}.bin"))
        .ok_or_else(|| CliError::usage(format!("gen needs --out or ${OUT_DIR_VAR}")))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let file = File::create(&path).map_err(|source| CliError::File { path: path.display().to_string(), source })?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    match ext {
        "gr" => graph::write_dimacs_gr(&g, BufWriter::new(file))?,
        "tsv" | "txt" => graph::write_edge_list(&g, BufWriter::new(file))?,
        _ => graph::write_binary(&g, BufWriter::new(file))?,
    }
    let mut invocation = vec!["gen".to_string()];
    invocation.extend(graph_invocation(&desc));
    invocation.extend(["--out".to_string(), path.display().to_string()]);
    let mut record = RunRecord::new("gen", invocation, desc, "none", Params { seed: args.graph.graph_seed, ..Default::default() });
    record.wall_time = start.elapsed().as_secs_f64();
    Ok((record, path))
}

pub fn cmd_diam(args: &DiamArgs) -> CliResult<RunRecord> {
    let start = Instant::now();
    let (g, desc) = load(&args.graph)?;
    let tau = resolve_tau(&args.cluster, g.node_count())?;
    let opts = diameter_options(&args.cluster)?;
    let est = approximate_diameter(&g, tau, &Rng::new(args.seed), &opts)?;

    let mut invocation = vec!["diam".to_string()];
    invocation.extend(graph_invocation(&desc));
    invocation.extend(cluster_invocation(&args.cluster, tau));
    invocation.extend(["--seed".to_string(), args.seed.to_string()]);
    if args.oracle {
        invocation.push("--oracle".into());
    }
    let params = Params {
        seed: args.seed,
        tau: Some(tau),
        delta_init: Some(args.cluster.delta_init.clone()),
        budget: Some(args.cluster.budget == Switch::On),
        ..Default::default()
    };
    let mut record = RunRecord::new("diam", invocation, desc, algo_name(args.cluster.algo), params);
    record.metrics = Some(est.metrics);
    record.estimates.phi_approx = Some(est.phi_approx);
    record.estimates.radius = Some(est.radius);
    record.estimates.clusters = Some(est.cluster_count);
    record.estimates.delta_end = est.delta_end;
    if args.oracle {
        record.oracle.push(exact_report(&g, oracle::DIAMETER_CAP)?);
    }
    record.wall_time = start.elapsed().as_secs_f64();
    Ok(record)
}

pub fn cmd_sssp(args: &SsspArgs) -> CliResult<RunRecord> {
    let start = Instant::now();
    let (g, desc) = load(&args.graph)?;
    let n = g.node_count();
    let source = args.source.unwrap_or_else(|| random_source(n, args.seed));
    if source >= n {
        return Err(CliError::usage(format!("--source {source} is not a node (n = {n})")));
    }
    let grid = parse_grid(&args.delta_grid, g.mean_weight().unwrap_or(1.0))?;
    let tuned = tune_delta(&g, source, &grid)?;
    let upper = sssp_diameter_upper(&g, source, tuned.best_delta)?;
    let lower = (args.lower > 0).then(|| iterated_sssp_lower(&g, source, args.lower)).transpose()?;

    let mut invocation = vec!["sssp".to_string()];
    invocation.extend(graph_invocation(&desc));
    invocation.extend([
        "--source".to_string(),
        source.to_string(),
        "--seed".to_string(),
        args.seed.to_string(),
        "--delta-grid".to_string(),
        args.delta_grid.clone(),
        "--lower".to_string(),
        args.lower.to_string(),
    ]);
    if args.oracle {
        invocation.push("--oracle".into());
    }
    let params = Params { seed: args.seed, source: Some(source), delta_grid: Some(grid), ..Default::default() };
    let mut record = RunRecord::new("sssp", invocation, desc, "delta-stepping", params);
    record.metrics = Some(tuned.best.metrics);
    record.estimates.upper = Some(upper);
    record.estimates.lower = lower;
    record.estimates.best_delta = Some(tuned.best_delta);
    record.estimates.candidates = tuned.candidates;
    if args.oracle {
        if tuned.best.dist != oracle::dijkstra(&g, source) {
            return Err(CliError::Verification("Δ-stepping distances differ from Dijkstra".into()));
        }
        record.oracle.push(exact_report(&g, oracle::DIAMETER_CAP)?);
    }
    record.wall_time = start.elapsed().as_secs_f64();
    Ok(record)
}

/// Result of `compare`: the record (which embeds every row) plus the plot
/// summary lines.
#[derive(Clone, Debug)]
pub struct CompareReport {
    pub record: RunRecord,
    pub plot: Vec<PlotBar>,
}

/// Mean, min and max of one metric for one algorithm across seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotBar {
    pub metric: &'static str,
    pub algo: String,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

pub const CL_DIAM: &str = "cl-diam";
pub const DELTA_STEPPING: &str = "delta-stepping";

pub fn cmd_compare(args: &CompareArgs) -> CliResult<CompareReport> {
    let start = Instant::now();
    let seeds = parse_seeds(&args.seeds)?;
    let (g, desc) = load(&args.graph)?;
    let n = g.node_count();
    let tau = resolve_tau(&args.cluster, n)?;
    let opts = diameter_options(&args.cluster)?;
    let grid = parse_grid(&args.delta_grid, g.mean_weight().unwrap_or(1.0))?;
    if args.lower == 0 {
        return Err(CliError::usage("compare needs --lower of at least 1"));
    }

    let mut lower = 0.0f64;
    for &seed in &seeds {
        lower = lower.max(iterated_sssp_lower(&g, random_source(n, seed), args.lower)?);
    }
    let ratio = |x: f64| if lower > 0.0 { x / lower } else { 1.0 };

    let mut rows = Vec::new();
    for &seed in &seeds {
        let t = Instant::now();
        let est = approximate_diameter(&g, tau, &Rng::new(seed), &opts)?;
        rows.push(CompareRow {
            algo: CL_DIAM.into(),
            seed,
            approx_ratio: ratio(est.phi_approx),
            wall_time: t.elapsed().as_secs_f64(),
            rounds: est.metrics.rounds,
            work: est.metrics.work(),
        });

        let t = Instant::now();
        let source = random_source(n, seed);
        let tuned = tune_delta(&g, source, &grid)?;
        let upper = sssp_diameter_upper(&g, source, tuned.best_delta)?;
        rows.push(CompareRow {
            algo: DELTA_STEPPING.into(),
            seed,
            approx_ratio: ratio(upper),
            wall_time: t.elapsed().as_secs_f64(),
            rounds: tuned.best.metrics.rounds,
            work: tuned.best.metrics.work(),
        });
    }

    let mut invocation = vec!["compare".to_string()];
    invocation.extend(graph_invocation(&desc));
    invocation.extend(cluster_invocation(&args.cluster, tau));
    invocation.extend([
        "--seeds".to_string(),
        args.seeds.clone(),
        "--delta-grid".to_string(),
        args.delta_grid.clone(),
        "--lower".to_string(),
        args.lower.to_string(),
    ]);
    let params = Params {
        seed: seeds[0],
        tau: Some(tau),
        delta_init: Some(args.cluster.delta_init.clone()),
        budget: Some(args.cluster.budget == Switch::On),
        delta_grid: Some(grid),
        seeds: Some(seeds),
        ..Default::default()
    };
    let mut record = RunRecord::new("compare", invocation, desc, algo_name(args.cluster.algo), params);
    record.estimates.lower = Some(lower);
    let plot = plot_bars(&rows);
    record.estimates.rows = rows;
    record.wall_time = start.elapsed().as_secs_f64();
    Ok(CompareReport { record, plot })
}

type Metric = (&'static str, fn(&CompareRow) -> f64);

fn plot_bars(rows: &[CompareRow]) -> Vec<PlotBar> {
    let mut bars = Vec::new();
    let metrics: [Metric; 3] = [
        ("approx_ratio", |r| r.approx_ratio),
        ("rounds", |r| r.rounds as f64),
        ("work", |r| r.work as f64),
    ];
    for (metric, get) in metrics {
        for algo in [CL_DIAM, DELTA_STEPPING] {
            let values: Vec<f64> = rows.iter().filter(|r| r.algo == algo).map(get).collect();
            if values.is_empty() {
                continue;
            }
            bars.push(PlotBar {
                metric,
                algo: algo.to_string(),
                mean: values.iter().sum::<f64>() / values.len() as f64,
                min: values.iter().copied().fold(f64::INFINITY, f64::min),
                max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            });
        }
    }
    bars
}

pub fn write_compare_csv(rows: &[CompareRow], out: impl Write) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPARE_HEADER)?;
    for r in rows {
        w.write_record([
            r.algo.clone(),
            r.seed.to_string(),
            r.approx_ratio.to_string(),
            r.wall_time.to_string(),
            r.rounds.to_string(),
            r.work.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_plot_data(bars: &[PlotBar], mut out: impl Write) -> CliResult<()> {
    writeln!(out, "metric\talgo\tmean\tmin\tmax")?;
    for b in bars {
        writeln!(out, "{}\t{}\t{}\t{}\t{}", b.metric, b.algo, b.mean, b.min, b.max)?;
    }
    Ok(())
}

/// Path of the plot data that accompanies a comparison CSV.
pub fn plot_path(csv: &Path) -> PathBuf {
    csv.with_extension("plot.tsv")
}

pub fn cmd_oracle(args: &OracleArgs) -> CliResult<RunRecord> {
    let start = Instant::now();
    let (g, desc) = load(&args.graph)?;
    let mut invocation = vec!["oracle".to_string()];
    invocation.extend(graph_invocation(&desc));
    let (report, params) = match args.quantity {
        Quantity::Diameter => {
            invocation.extend(["--quantity".into(), "diameter".into(), "--cap".into(), args.cap.to_string()]);
            (exact_report(&g, args.cap)?, Params::default())
        }
        Quantity::ClusterRadius => {
            invocation.extend(["--quantity".into(), "cluster-radius".into(), "--tau".into(), args.tau.to_string()]);
            let r = OracleReport::measure("cluster_radius", OracleMethod::ExhaustiveClustering, &g, || {
                oracle::optimal_cluster_radius(&g, args.tau)
            })?;
            (r, Params { tau: Some(args.tau), ..Default::default() })
        }
        Quantity::HopRadius => {
            let delta = args.delta.unwrap_or(4.0 * g.mean_weight().unwrap_or(1.0));
            invocation.extend(["--quantity".into(), "hop-radius".into(), "--delta".into(), delta.to_string()]);
            let r = OracleReport::measure("hop_radius", OracleMethod::HopMinimalDijkstra, &g, || {
                oracle::hop_radius(&g, delta).map(|h| h as f64)
            })?;
            (r, Params { delta_grid: Some(vec![delta]), ..Default::default() })
        }
    };
    let mut record = RunRecord::new("oracle", invocation, desc, report.method.as_str(), params);
    record.oracle.push(report);
    record.wall_time = start.elapsed().as_secs_f64();
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_init_forms() {
        assert_eq!(parse_delta_init("min").unwrap(), DeltaInit::MinWeight);
        assert_eq!(parse_delta_init("mean").unwrap(), DeltaInit::MeanWeight);
        assert_eq!(parse_delta_init("2.5").unwrap(), DeltaInit::Value(2.5));
        assert!(parse_delta_init("-1").is_err());
        assert!(parse_delta_init("max").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("geo:-1:1", 2.0).unwrap(), vec![1.0, 2.0, 4.0]);
        assert_eq!(parse_grid("0.5, 3", 2.0).unwrap(), vec![0.5, 3.0]);
        assert_eq!(parse_grid("7", 2.0).unwrap(), vec![7.0]);
        assert!(parse_grid("geo:2:1", 1.0).is_err());
        assert!(parse_grid("0", 1.0).is_err());
    }

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("0..3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("5,9").unwrap(), vec![5, 9]);
        assert!(parse_seeds("").is_err());
        assert!(parse_seeds("4..4").is_err());
    }

    #[test]
    fn sources_are_in_range_and_seeded() {
        for seed in 0..50 {
            assert!(random_source(7, seed) < 7);
        }
        assert_eq!(random_source(1000, 3), random_source(1000, 3));
    }
}
