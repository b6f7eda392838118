//! Δ-stepping single-source shortest paths and the SSSP-based diameter
//! bounds it is compared against.
//!
//! Nodes live in buckets of width Δ keyed by `⌊dist / Δ⌋`. The smallest
//! non-empty bucket is emptied repeatedly: every node taken from it relaxes
//! its light edges (`w ≤ Δ`) in one superstep, which may refill the bucket.
//! Once it stays empty, all nodes removed from it relax their heavy edges in
//! one more superstep. Each superstep counts as a round; every relaxation
//! request is a message and every improved distance a node update.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::RunMetrics;
use crate::error::{Error, Result};
use crate::graph::{component_members, connected_components, Graph, NodeId};

#[derive(Clone, Debug, PartialEq)]
pub struct SsspResult {
    pub source: NodeId,
    pub delta: f64,
    /// `f64::INFINITY` for unreachable nodes.
    pub dist: Vec<f64>,
    pub metrics: RunMetrics,
}

impl SsspResult {
    /// Largest finite distance.
    pub fn eccentricity(&self) -> f64 {
        self.dist.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max)
    }

    /// Farthest reachable node; ties go to the smallest id.
    pub fn farthest(&self) -> NodeId {
        let mut best = self.source;
        for (v, &d) in self.dist.iter().enumerate() {
            if d.is_finite() && d > self.dist[best] {
                best = v;
            }
        }
        best
    }
}

struct Buckets {
    width: f64,
    slots: BTreeMap<u64, Vec<u32>>,
    /// Bucket each node currently belongs to; stale entries are skipped.
    home: Vec<Option<u64>>,
}

impl Buckets {
    fn index(&self, d: f64) -> u64 {
        let i = (d / self.width).floor();
        if i >= u64::MAX as f64 {
            u64::MAX
        } else {
            i as u64
        }
    }

    fn insert(&mut self, v: usize, d: f64) {
        let i = self.index(d);
        if self.home[v] != Some(i) {
            self.home[v] = Some(i);
            self.slots.entry(i).or_default().push(v as u32);
        }
    }

    /// Removes and returns the live members of bucket `i`, sorted.
    fn take(&mut self, i: u64) -> Vec<u32> {
        let mut members = self.slots.remove(&i).unwrap_or_default();
        members.retain(|&v| self.home[v as usize] == Some(i));
        members.sort_unstable();
        members.dedup();
        for &v in &members {
            self.home[v as usize] = None;
        }
        members
    }
}

fn relax_round(
    g: &Graph,
    dist: &mut [f64],
    buckets: &mut Buckets,
    senders: &[u32],
    light: bool,
    delta: f64,
    metrics: &mut RunMetrics,
) {
    let snapshot: &[f64] = dist;
    let mut requests: Vec<(u32, f64)> = senders
        .par_iter()
        .flat_map_iter(|&u| {
            let du = snapshot[u as usize];
            g.neighbors(u as usize)
                .filter(move |&(_, w)| (w <= delta) == light)
                .map(move |(v, w)| (v as u32, du + w))
        })
        .collect();
    metrics.messages += requests.len() as u64;
    metrics.rounds += 1;
    requests.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    requests.dedup_by_key(|r| r.0);
    for (v, d) in requests {
        let v = v as usize;
        if d < dist[v] {
            dist[v] = d;
            buckets.insert(v, d);
            metrics.node_updates += 1;
        }
    }
}

/// Exact SSSP from `source` by Δ-stepping with bucket width `delta`.
pub fn delta_stepping(g: &Graph, source: NodeId, delta: f64) -> Result<SsspResult> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::validation(format!("delta {delta} must be positive and finite")));
    }
    if source >= g.node_count() {
        return Err(Error::validation(format!("source {source} is not a node")));
    }
    let start = Instant::now();
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut buckets = Buckets {
        width: delta,
        slots: BTreeMap::new(),
        home: vec![None; n],
    };
    let mut metrics = RunMetrics::default();
    dist[source] = 0.0;
    buckets.insert(source, 0.0);

    while let Some(&i) = buckets.slots.keys().next() {
        let mut settled: Vec<u32> = Vec::new();
        loop {
            let frontier = buckets.take(i);
            if frontier.is_empty() {
                break;
            }
            relax_round(g, &mut dist, &mut buckets, &frontier, true, delta, &mut metrics);
            settled.extend(frontier);
        }
        settled.sort_unstable();
        settled.dedup();
        let has_heavy = settled
            .iter()
            .any(|&u| g.neighbors(u as usize).any(|(_, w)| w > delta));
        if has_heavy {
            relax_round(g, &mut dist, &mut buckets, &settled, false, delta, &mut metrics);
        }
    }
    metrics.wall_time = start.elapsed().as_secs_f64();
    Ok(SsspResult { source, delta, dist, metrics })
}

/// Twice the largest shortest-path distance, taken per component (from
/// `source` in its own component, from the smallest id elsewhere) and
/// maximized. An upper bound on the diameter.
pub fn sssp_diameter_upper(g: &Graph, source: NodeId, delta: f64) -> Result<f64> {
    let labels = connected_components(g);
    let mut upper = 0.0f64;
    for members in component_members(&labels) {
        let s = if labels[source] == members[0] { source } else { members[0] };
        if members.len() > 1 {
            upper = upper.max(2.0 * delta_stepping(g, s, delta)?.eccentricity());
        }
    }
    Ok(upper)
}

/// Lower bound on the diameter: repeatedly run SSSP and restart from the
/// farthest node found, keeping the largest eccentricity seen.
pub fn iterated_sssp_lower(g: &Graph, start: NodeId, iterations: usize) -> Result<f64> {
    if iterations == 0 {
        return Err(Error::validation("at least one iteration is required"));
    }
    let delta = g.mean_weight().unwrap_or(1.0);
    let mut source = start;
    let mut best = 0.0f64;
    for _ in 0..iterations {
        let run = delta_stepping(g, source, delta)?;
        best = best.max(run.eccentricity());
        let next = run.farthest();
        if next == source {
            break;
        }
        source = next;
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuneEntry {
    pub delta: f64,
    pub metrics: RunMetrics,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuneResult {
    pub best_delta: f64,
    pub best: SsspResult,
    pub candidates: Vec<TuneEntry>,
}

/// Runs Δ-stepping from `source` for every candidate and keeps the one with
/// the fewest rounds; ties go to the smaller Δ.
pub fn tune_delta(g: &Graph, source: NodeId, candidates: &[f64]) -> Result<TuneResult> {
    if candidates.is_empty() {
        return Err(Error::validation("no delta candidates"));
    }
    let mut entries = Vec::with_capacity(candidates.len());
    let mut best: Option<SsspResult> = None;
    for &delta in candidates {
        let run = delta_stepping(g, source, delta)?;
        entries.push(TuneEntry { delta, metrics: run.metrics });
        let better = match &best {
            None => true,
            Some(b) => {
                (run.metrics.rounds, OrderedDelta(delta)) < (b.metrics.rounds, OrderedDelta(b.delta))
            }
        };
        if better {
            best = Some(run);
        }
    }
    let best = best.expect("non-empty candidates");
    Ok(TuneResult { best_delta: best.delta, best, candidates: entries })
}

#[derive(PartialEq, PartialOrd)]
struct OrderedDelta(f64);

/// `mean · 2^k` for `k` in `lo..=hi`.
pub fn geometric_grid(mean: f64, lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| mean * 2f64.powi(k)).collect()
}
