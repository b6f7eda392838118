use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Weighted graph diameter approximation and the Δ-stepping baseline.
#[derive(Debug, Parser)]
#[command(name = "cldiam", version, about)]
pub struct Cli {
    /// Worker threads for parallel phases (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate or convert a graph and write it to a file.
    Gen(GenArgs),
    /// Approximate the diameter by clustering.
    Diam(DiamArgs),
    /// Run tuned Δ-stepping and report SSSP diameter bounds.
    Sssp(SsspArgs),
    /// Compare both approaches over several seeds.
    Compare(CompareArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
    /// Compute a reference value by brute force.
    Oracle(OracleArgs),
}

#[derive(Clone, Debug, Args)]
pub struct GraphArgs {
    /// `mesh:S`, `rmat:S`, `roads:FILE:S`, or a file (.gr, .bin, or edge list).
    #[arg(long)]
    pub graph: String,

    /// `as-given`, `uniform` or `two-point:P:SMALL:BIG` (default: uniform for
    /// generated graphs, as-given for files).
    #[arg(long)]
    pub weights: Option<String>,

    /// Seed for the generator and the weights.
    #[arg(long, default_value_t = 1)]
    pub graph_seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Cluster,
    Cluster2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    Off,
    On,
}

#[derive(Clone, Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    /// Output file; `.gr` writes DIMACS, `.tsv`/`.txt` an edge list, anything
    /// else the binary cache. Defaults to a file in $CLDIAM_OUT_DIR.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct ClusterArgs {
    /// Target cluster parameter τ (default: largest τ predicted to give at
    /// most --max-clusters clusters).
    #[arg(long)]
    pub tau: Option<usize>,

    #[arg(long, value_enum, default_value_t = Algo::Cluster)]
    pub algo: Algo,

    /// Initial Δ: `min`, `mean`, or a number.
    #[arg(long, default_value = "mean")]
    pub delta_init: String,

    /// Cap the steps of each growth phase.
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    pub budget: Switch,

    #[arg(long, default_value_t = 100_000)]
    pub max_clusters: usize,
}

#[derive(Clone, Debug, Args)]
pub struct DiamArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    #[command(flatten)]
    pub cluster: ClusterArgs,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Also compute the exact diameter and report the ratio.
    #[arg(long)]
    pub oracle: bool,

    /// JSON-lines file to append the record to.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct SsspArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    /// Source node (default: drawn from --seed).
    #[arg(long)]
    pub source: Option<usize>,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Δ candidates: `geo:LO:HI` for mean·2^k with k in LO..=HI, or a
    /// comma-separated list.
    #[arg(long, default_value = "geo:-6:3")]
    pub delta_grid: String,

    /// Iterations of the farthest-node lower bound; 0 skips it.
    #[arg(long, default_value_t = 4)]
    pub lower: usize,

    /// Check distances against Dijkstra and add the exact diameter.
    #[arg(long)]
    pub oracle: bool,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    #[command(flatten)]
    pub cluster: ClusterArgs,

    /// `A..B` (B excluded) or a comma-separated list.
    #[arg(long, default_value = "0..10")]
    pub seeds: String,

    #[arg(long, default_value = "geo:-6:3")]
    pub delta_grid: String,

    #[arg(long, default_value_t = 4)]
    pub lower: usize,

    /// CSV file; the plot data goes next to it with a `.plot.tsv` suffix.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Level::Fast)]
    pub level: Level,

    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,

    /// Also check the integrity of a binary graph cache.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Diameter,
    ClusterRadius,
    HopRadius,
}

#[derive(Clone, Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    #[arg(long, value_enum, default_value_t = Quantity::Diameter)]
    pub quantity: Quantity,

    /// Cluster count for `cluster-radius`.
    #[arg(long, default_value_t = 1)]
    pub tau: usize,

    /// Distance bound for `hop-radius` (default: 4 × mean weight).
    #[arg(long)]
    pub delta: Option<f64>,

    /// Node limit for `diameter`.
    #[arg(long, default_value_t = cldiam::oracle::DIAMETER_CAP)]
    pub cap: usize,

    #[arg(long)]
    pub out: Option<PathBuf>,
}
