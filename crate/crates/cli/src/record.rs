//! Self-describing run records, written one JSON object per line.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use cldiam::baseline::TuneEntry;
use cldiam::oracle::OracleReport;
use cldiam::RunMetrics;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliResult;
use crate::source::GraphDescriptor;

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Keys that hold timings; they are the only fields allowed to differ
/// between two runs of the same invocation.
pub const TIMING_KEYS: [&str; 3] = ["started_at", "wall_time", "runtime"];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_init: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimates {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_approx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clusters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_delta: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub candidates: Vec<TuneEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub rows: Vec<CompareRow>,
}

/// One line of the comparison table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub algo: String,
    pub seed: u64,
    pub approx_ratio: f64,
    pub wall_time: f64,
    pub rounds: u64,
    pub work: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub artifact_version: String,
    pub command: String,
    /// Arguments that reproduce this record.
    pub invocation: Vec<String>,
    pub graph: GraphDescriptor,
    pub algorithm: String,
    pub params: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<RunMetrics>,
    pub estimates: Estimates,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub oracle: Vec<OracleReport>,
    pub started_at: u64,
    pub wall_time: f64,
}

impl RunRecord {
    pub fn new(command: &str, invocation: Vec<String>, graph: GraphDescriptor, algorithm: &str, params: Params) -> Self {
        RunRecord {
            schema_version: SCHEMA_VERSION,
            artifact_version: ARTIFACT_VERSION.to_string(),
            command: command.to_string(),
            invocation,
            graph,
            algorithm: algorithm.to_string(),
            params,
            metrics: None,
            estimates: Estimates::default(),
            oracle: Vec::new(),
            started_at: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            wall_time: 0.0,
        }
    }

    pub fn to_json_line(&self) -> CliResult<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// The record as JSON with every timing field removed.
    pub fn canonical(&self) -> CliResult<String> {
        canonicalize(&self.to_json_line()?)
    }

    /// Appends the record to a JSON-lines file.
    pub fn append_to(&self, path: &Path) -> CliResult<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        writeln!(f, "{}", self.to_json_line()?)?;
        Ok(())
    }
}

/// Strips timing keys, at any depth, from one JSON record line.
pub fn canonicalize(line: &str) -> CliResult<String> {
    fn strip(v: &mut Value) {
        match v {
            Value::Object(map) => {
                for key in TIMING_KEYS {
                    map.remove(key);
                }
                map.values_mut().for_each(strip);
            }
            Value::Array(items) => items.iter_mut().for_each(strip),
            _ => {}
        }
    }
    let mut v: Value = serde_json::from_str(line)?;
    strip(&mut v);
    Ok(serde_json::to_string(&v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cldiam::WeightModel;

    fn record() -> RunRecord {
        let graph = GraphDescriptor {
            spec: "mesh:4".into(),
            weights: WeightModel::Uniform,
            graph_seed: 1,
            nodes: 16,
            edges: 24,
        };
        let mut r = RunRecord::new("diam", vec!["diam".into()], graph, "cluster", Params::default());
        r.metrics = Some(RunMetrics { rounds: 3, wall_time: 0.5, ..Default::default() });
        r.wall_time = 0.7;
        r
    }

    #[test]
    fn canonical_form_ignores_timings() {
        let a = record();
        let mut b = record();
        b.started_at += 100;
        b.wall_time = 9.0;
        b.metrics.as_mut().unwrap().wall_time = 3.0;
        assert_ne!(a.to_json_line().unwrap(), b.to_json_line().unwrap());
        assert_eq!(a.canonical().unwrap(), b.canonical().unwrap());
        assert!(!a.canonical().unwrap().contains("wall_time"));
    }

    #[test]
    fn records_parse_back() {
        let a = record();
        let back: RunRecord = serde_json::from_str(&a.to_json_line().unwrap()).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.schema_version, SCHEMA_VERSION);
    }
}
