//! Bulk-synchronous Δ-growing steps over a working graph.
//!
//! One step is one superstep: every covered node with `d < Δ` offers
//! `d + w` to the far end of each light edge (`w ≤ Δ`) as long as the offer
//! stays within `Δ`. Offers are computed against the states at the start of
//! the step; each target keeps the smallest offer, ordered by distance and
//! then by center id, and adopts it only if it strictly improves its
//! distance.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Per-node growth state.
///
/// `d` is the control distance in the current working graph; `d_orig` is an
/// upper bound on the distance to the center in the original graph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeState {
    pub center: Option<u32>,
    pub d: f64,
    pub d_orig: f64,
    /// Stage at which the node was last covered.
    pub epoch: u32,
}

impl NodeState {
    pub const UNSET: NodeState = NodeState {
        center: None,
        d: f64::INFINITY,
        d_orig: f64::INFINITY,
        epoch: 0,
    };

    pub fn center_of_itself(u: NodeId, epoch: u32) -> Self {
        NodeState {
            center: Some(u as u32),
            d: 0.0,
            d_orig: 0.0,
            epoch,
        }
    }

    pub fn is_covered(&self) -> bool {
        self.center.is_some()
    }
}

/// Round and work counters. Work is node updates plus messages.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub growing_steps: u64,
    pub rounds: u64,
    pub node_updates: u64,
    pub messages: u64,
    /// Seconds; informational only.
    pub wall_time: f64,
}

impl RunMetrics {
    pub fn work(&self) -> u64 {
        self.node_updates + self.messages
    }

    /// The same counters with `wall_time` zeroed, for comparing runs.
    pub fn untimed(&self) -> RunMetrics {
        RunMetrics {
            wall_time: 0.0,
            ..*self
        }
    }

    /// Adds `other` as a phase that ran after `self`.
    pub fn then(&mut self, other: &RunMetrics) {
        self.growing_steps += other.growing_steps;
        self.rounds += other.rounds;
        self.node_updates += other.node_updates;
        self.messages += other.messages;
        self.wall_time += other.wall_time;
    }

    /// Adds `other` as a computation that ran alongside `self`: rounds and
    /// steps take the maximum, work adds up.
    pub fn alongside(&mut self, other: &RunMetrics) {
        self.growing_steps = self.growing_steps.max(other.growing_steps);
        self.rounds = self.rounds.max(other.rounds);
        self.node_updates += other.node_updates;
        self.messages += other.messages;
        self.wall_time += other.wall_time;
    }
}

/// Optional cap on growing steps per growth phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepBudget {
    max_steps: Option<u64>,
}

impl StepBudget {
    pub const UNLIMITED: StepBudget = StepBudget { max_steps: None };

    pub fn capped(max_steps: u64) -> Result<Self> {
        if max_steps == 0 {
            return Err(Error::validation("step budget must allow at least one step"));
        }
        Ok(StepBudget {
            max_steps: Some(max_steps),
        })
    }

    pub fn max_steps(&self) -> Option<u64> {
        self.max_steps
    }
}

/// Adjacency entry of the working graph. `weight` drives growth; `length`
/// is the original-scale distance added to the tail's bound when the edge
/// is traversed from the owning node to `peer`. The two agree until
/// contraction folds a cluster's bound into the edges leaving it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorkEdge {
    pub peer: u32,
    pub weight: f64,
    pub length: f64,
}

impl WorkEdge {
    /// How much longer the edge is in the original graph than its working
    /// weight says.
    pub fn offset(&self) -> f64 {
        self.length - self.weight
    }
}

/// Graph on which growth runs. Node ids are those of the original graph;
/// nodes removed by contraction are inactive and have no edges.
#[derive(Clone, Debug)]
pub struct WorkGraph {
    active: Vec<bool>,
    offsets: Vec<usize>,
    edges: Vec<WorkEdge>,
    active_count: usize,
}

impl WorkGraph {
    pub fn from_graph(g: &Graph) -> Self {
        let edges = g
            .targets()
            .iter()
            .zip(g.weights())
            .map(|(&peer, &weight)| WorkEdge {
                peer,
                weight,
                length: weight,
            })
            .collect();
        WorkGraph {
            active: vec![true; g.node_count()],
            offsets: g.offsets().to_vec(),
            edges,
            active_count: g.node_count(),
        }
    }

    /// Builds from directed entries `(owner, edge)`; callers supply both
    /// directions of every edge.
    pub(crate) fn from_entries(active: Vec<bool>, mut entries: Vec<(u32, WorkEdge)>) -> Self {
        let n = active.len();
        entries.sort_unstable_by_key(|e| (e.0, e.1.peer));
        let mut offsets = vec![0usize; n + 1];
        for &(owner, _) in &entries {
            offsets[owner as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let active_count = active.iter().filter(|&&a| a).count();
        WorkGraph {
            active,
            offsets,
            edges: entries.into_iter().map(|e| e.1).collect(),
            active_count,
        }
    }

    /// Size of the id space (original node count).
    pub fn capacity(&self) -> usize {
        self.active.len()
    }

    pub fn active_count(&self) -> usize {
        self.active_count
    }

    pub fn is_active(&self, u: NodeId) -> bool {
        self.active[u]
    }

    pub fn edge_entries(&self) -> usize {
        self.edges.len()
    }

    pub fn edges_of(&self, u: NodeId) -> &[WorkEdge] {
        &self.edges[self.offsets[u]..self.offsets[u + 1]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Quiescent,
    Coverage,
    Budget,
}

/// When a growth phase ends, besides quiescence and budget exhaustion.
#[derive(Clone, Copy, Debug)]
pub enum StopRule<'a> {
    UntilQuiescent,
    /// Stop once at least half of the `tracked` nodes (`total` of them) are
    /// covered.
    HalfCovered { tracked: &'a [bool], total: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct GrowthOutcome {
    pub metrics: RunMetrics,
    pub stop: StopReason,
}

#[derive(Clone, Copy)]
struct Offer {
    d: f64,
    center: u32,
    d_orig: f64,
}

/// Runs one step with every covered node below `delta` as a sender.
/// Returns whether any state changed.
pub fn delta_growing_step(
    g: &WorkGraph,
    states: &mut [NodeState],
    delta: f64,
    epoch: u32,
    metrics: &mut RunMetrics,
) -> bool {
    let senders = initial_senders(g, states, delta);
    let changed = !step(g, states, &senders, delta, epoch, metrics).is_empty();
    metrics.growing_steps += 1;
    metrics.rounds += 1;
    changed
}

fn initial_senders(g: &WorkGraph, states: &[NodeState], delta: f64) -> Vec<u32> {
    (0..g.capacity())
        .filter(|&u| g.is_active(u) && states[u].is_covered() && states[u].d < delta)
        .map(|u| u as u32)
        .collect()
}

/// One superstep from `senders`; returns the nodes whose state changed, in
/// increasing id order, each flagged if it was uncovered before the step.
fn step(
    g: &WorkGraph,
    states: &mut [NodeState],
    senders: &[u32],
    delta: f64,
    epoch: u32,
    metrics: &mut RunMetrics,
) -> Vec<(u32, bool)> {
    let snapshot: &[NodeState] = states;
    let offers: Vec<(u32, Offer)> = senders
        .par_iter()
        .flat_map_iter(|&u| {
            let s = snapshot[u as usize];
            let center = s.center.expect("senders are covered");
            g.edges_of(u as usize).iter().filter_map(move |e| {
                let d = s.d + e.weight;
                (s.d < delta && e.weight <= delta && d <= delta).then_some((
                    e.peer,
                    Offer {
                        d,
                        center,
                        d_orig: s.d_orig + e.length,
                    },
                ))
            })
        })
        .collect();
    metrics.messages += offers.len() as u64;

    // Min-reduction per target; the order is a total order, so the result
    // does not depend on how offers were produced.
    let mut best: Vec<(u32, Offer)> = offers;
    best.sort_unstable_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.d.total_cmp(&b.1.d))
            .then(a.1.center.cmp(&b.1.center))
            .then(a.1.d_orig.total_cmp(&b.1.d_orig))
    });
    best.dedup_by_key(|e| e.0);

    let mut updated = Vec::new();
    for (v, offer) in best {
        let cur = &mut states[v as usize];
        if offer.d < cur.d {
            let was_uncovered = !cur.is_covered();
            *cur = NodeState {
                center: Some(offer.center),
                d: offer.d,
                d_orig: offer.d_orig,
                epoch,
            };
            updated.push((v, was_uncovered));
        }
    }
    metrics.node_updates += updated.len() as u64;
    updated
}

/// Repeats growing steps until the stop rule fires, no state changes, or the
/// budget is spent. After the first step only nodes updated in the previous
/// step send offers; under read-old/write-new semantics the other senders'
/// offers could not improve anything.
pub fn run_growth_phase(
    g: &WorkGraph,
    states: &mut [NodeState],
    delta: f64,
    stop: StopRule<'_>,
    budget: StepBudget,
    epoch: u32,
) -> GrowthOutcome {
    let start = Instant::now();
    let mut metrics = RunMetrics::default();
    let mut covered_tracked = match stop {
        StopRule::HalfCovered { tracked, .. } => (0..g.capacity())
            .filter(|&u| tracked[u] && states[u].is_covered())
            .count(),
        StopRule::UntilQuiescent => 0,
    };
    let mut senders = initial_senders(g, states, delta);
    let reason = loop {
        if senders.is_empty() {
            break StopReason::Quiescent;
        }
        if budget.max_steps.is_some_and(|cap| metrics.growing_steps >= cap) {
            break StopReason::Budget;
        }
        let updated = step(g, states, &senders, delta, epoch, &mut metrics);
        metrics.growing_steps += 1;
        metrics.rounds += 1;
        if updated.is_empty() {
            break StopReason::Quiescent;
        }
        if let StopRule::HalfCovered { tracked, total } = stop {
            covered_tracked += updated
                .iter()
                .filter(|&&(v, fresh)| fresh && tracked[v as usize])
                .count();
            if 2 * covered_tracked >= total {
                break StopReason::Coverage;
            }
        }
        senders = updated
            .into_iter()
            .map(|(v, _)| v)
            .filter(|&v| states[v as usize].d < delta)
            .collect();
    };
    metrics.wall_time = start.elapsed().as_secs_f64();
    GrowthOutcome {
        metrics,
        stop: reason,
    }
}
