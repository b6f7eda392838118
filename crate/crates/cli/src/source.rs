//! Graph specifications accepted by `--graph`.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cldiam::{graph, Graph, Rng, WeightModel};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Where a graph comes from: a generator or a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphSource {
    Mesh(usize),
    Rmat(u32),
    /// Path-product of the graph in the file with `copies` layers.
    Roads { base: PathBuf, copies: usize },
    File(PathBuf),
}

impl GraphSource {
    pub fn is_generated(&self) -> bool {
        matches!(self, GraphSource::Mesh(_) | GraphSource::Rmat(_))
    }

    /// Builds the unweighted-or-file-weighted graph. `seed` drives R-MAT.
    pub fn build(&self, seed: u64) -> CliResult<Graph> {
        Ok(match self {
            GraphSource::Mesh(s) => graph::mesh(*s)?,
            GraphSource::Rmat(s) => graph::rmat(*s, &Rng::new(seed))?,
            GraphSource::Roads { base, copies } => graph::roads_product(&load_file(base)?, *copies)?,
            GraphSource::File(path) => load_file(path)?,
        })
    }
}

impl FromStr for GraphSource {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let bad = || CliError::usage(format!("cannot parse graph spec {s:?}"));
        if let Some(rest) = s.strip_prefix("mesh:") {
            return rest.parse().map(GraphSource::Mesh).map_err(|_| bad());
        }
        if let Some(rest) = s.strip_prefix("rmat:") {
            return rest.parse().map(GraphSource::Rmat).map_err(|_| bad());
        }
        if let Some(rest) = s.strip_prefix("roads:") {
            let (base, copies) = rest.rsplit_once(':').ok_or_else(bad)?;
            let copies = copies.parse().map_err(|_| bad())?;
            return Ok(GraphSource::Roads { base: base.into(), copies });
        }
        if s.is_empty() {
            return Err(bad());
        }
        Ok(GraphSource::File(s.into()))
    }
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSource::Mesh(s) => write!(f, "mesh:{s}"),
            GraphSource::Rmat(s) => write!(f, "rmat:{s}"),
            GraphSource::Roads { base, copies } => write!(f, "roads:{}:{copies}", base.display()),
            GraphSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

fn file_error(path: &Path, e: cldiam::Error) -> CliError {
    match e {
        cldiam::Error::Io(source) => CliError::File { path: path.display().to_string(), source },
        other => CliError::Library(other),
    }
}

/// Loads by extension: `.gr` is DIMACS, `.bin` the binary cache, anything
/// else an edge list (weighted if its first row has three fields).
pub fn load_file(path: &Path) -> CliResult<Graph> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    match ext {
        "gr" => graph::load_dimacs_gr(path).map_err(|e| file_error(path, e)),
        "bin" => graph::load_binary(path).map_err(|e| file_error(path, e)),
        _ => {
            let weighted = sniff_weighted(path)?;
            graph::load_edge_list(path, weighted).map_err(|e| file_error(path, e))
        }
    }
}

fn sniff_weighted(path: &Path) -> CliResult<bool> {
    let file = File::open(path).map_err(|source| CliError::File { path: path.display().to_string(), source })?;
    for line in BufReader::new(file).lines() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        return Ok(t.split_whitespace().count() >= 3);
    }
    Ok(false)
}

/// Parses `as-given`, `uniform` or `two-point:P:SMALL:BIG`.
pub fn parse_weight_model(s: &str) -> CliResult<WeightModel> {
    let model = match s {
        "as-given" => WeightModel::AsGiven,
        "uniform" => WeightModel::Uniform,
        _ => {
            let parts: Vec<&str> = s.split(':').collect();
            let num = |t: &str| t.parse::<f64>().map_err(|_| CliError::usage(format!("bad number {t:?} in {s:?}")));
            match parts.as_slice() {
                ["two-point", p, small, big] => WeightModel::TwoPoint { p_big: num(p)?, small: num(small)?, big: num(big)? },
                _ => return Err(CliError::usage(format!("unknown weight model {s:?}"))),
            }
        }
    };
    model.validate()?;
    Ok(model)
}

pub fn weight_model_string(m: &WeightModel) -> String {
    match m {
        WeightModel::AsGiven => "as-given".into(),
        WeightModel::Uniform => "uniform".into(),
        WeightModel::TwoPoint { p_big, small, big } => format!("two-point:{p_big}:{small}:{big}"),
    }
}

/// Everything needed to rebuild the exact graph a run used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDescriptor {
    pub spec: String,
    pub weights: WeightModel,
    pub graph_seed: u64,
    pub nodes: usize,
    pub edges: usize,
}

/// Builds the graph for `spec`, then applies the weight model. `weights`
/// of `None` means uniform for generators and as-given for files.
pub fn materialize(spec: &GraphSource, weights: Option<WeightModel>, graph_seed: u64) -> CliResult<(Graph, GraphDescriptor)> {
    let model = weights.unwrap_or(if spec.is_generated() { WeightModel::Uniform } else { WeightModel::AsGiven });
    let base = spec.build(graph_seed)?;
    let g = graph::assign_weights(&base, model, &Rng::new(graph_seed))?;
    let desc = GraphDescriptor {
        spec: spec.to_string(),
        weights: model,
        graph_seed,
        nodes: g.node_count(),
        edges: g.edge_count(),
    };
    Ok((g, desc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs_round_trip() {
        for s in ["mesh:64", "rmat:12", "roads:data/usa.gr:3", "graphs/a.tsv"] {
            assert_eq!(s.parse::<GraphSource>().unwrap().to_string(), s);
        }
        assert!("mesh:x".parse::<GraphSource>().is_err());
        assert!("roads:foo".parse::<GraphSource>().is_err());
        assert!("".parse::<GraphSource>().is_err());
    }

    #[test]
    fn weight_models() {
        assert_eq!(parse_weight_model("uniform").unwrap(), WeightModel::Uniform);
        let m = parse_weight_model("two-point:0.1:1e-6:1").unwrap();
        assert_eq!(m, WeightModel::TwoPoint { p_big: 0.1, small: 1e-6, big: 1.0 });
        assert_eq!(parse_weight_model(&weight_model_string(&m)).unwrap(), m);
        assert!(parse_weight_model("two-point:2:1:1").is_err());
        assert!(parse_weight_model("gaussian").is_err());
    }

    #[test]
    fn generated_graphs_default_to_uniform() {
        let (g, d) = materialize(&GraphSource::Mesh(3), None, 1).unwrap();
        assert_eq!((d.nodes, d.edges), (9, 12));
        assert_eq!(d.weights, WeightModel::Uniform);
        assert!(g.weights().iter().all(|&w| w > 0.0 && w <= 1.0));
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let e = materialize(&GraphSource::File("/nonexistent/g.gr".into()), None, 1).unwrap_err();
        assert_eq!(e.exit_code(), crate::error::EXIT_IO);
    }
}
