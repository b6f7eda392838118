//! Progressive cluster growing.
//!
//! [`cluster`] grows clusters in stages. Each stage samples a batch of new
//! centers among the uncovered nodes, re-grows from them and from the
//! centers of earlier clusters with Δ-growing steps, and doubles Δ until at
//! least half of the uncovered nodes are reached. The covered nodes are then
//! contracted into their centers. When few nodes remain they become
//! singleton clusters.
//!
//! [`cluster2`] first runs [`cluster`] to learn a radius `R`, then performs
//! `⌈log₂ n⌉` iterations that sample centers with probability `2^i / n`,
//! grow to quiescence with `Δ = 2R`, and contract with rescaled frontier
//! weights `d_u + w − 2R`.
//!
//! Growth decisions use the working-graph distance `d`. Each node also
//! carries `d_orig`, an upper bound on its distance to the center in the
//! original graph, which is what the reported radius and the quotient graph
//! are built from.

use std::f64::consts::LN_2;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::engine::{
    run_growth_phase, NodeState, RunMetrics, StepBudget, StopReason, StopRule, WorkEdge, WorkGraph,
};
use crate::error::{Error, Result};
use crate::graph::{ceil_log2, Graph, NodeId};
use crate::rng::Rng;

/// Oversampling constant for center selection, `4 ln 2`.
pub const GAMMA: f64 = 4.0 * LN_2;

/// Initial guess for Δ in [`cluster`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaInit {
    MinWeight,
    MeanWeight,
    Value(f64),
}

impl DeltaInit {
    pub fn resolve(&self, g: &Graph) -> Result<f64> {
        let value = match *self {
            DeltaInit::MinWeight => g.min_weight().unwrap_or(1.0),
            DeltaInit::MeanWeight => g.mean_weight().unwrap_or(1.0),
            DeltaInit::Value(v) => v,
        };
        if value.is_finite() && value > 0.0 {
            Ok(value)
        } else {
            Err(Error::validation(format!("initial delta {value} must be positive and finite")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterOptions {
    pub delta_init: DeltaInit,
    /// Cap growth phases at `⌈n/τ⌉` steps (`⌈(n/τ)·log₂ n⌉` in [`cluster2`]).
    pub budget: bool,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        ClusterOptions {
            delta_init: DeltaInit::MeanWeight,
            budget: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Assignment {
    pub center: NodeId,
    /// Upper bound on the original-graph distance to `center`.
    pub d_orig: f64,
}

/// What one outer iteration did.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StageLog {
    pub uncovered_before: usize,
    pub new_centers: usize,
    /// Previously uncovered nodes covered in this stage, new centers included.
    pub covered: usize,
    pub delta: f64,
    pub growing_steps: u64,
    pub stop: Option<StopReason>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringResult {
    pub assignment: Vec<Assignment>,
    /// Cluster centers in increasing id order.
    pub centers: Vec<NodeId>,
    /// Largest `d_orig` over all nodes.
    pub radius: f64,
    /// Final Δ of [`cluster`]; `None` for [`cluster2`].
    pub delta_end: Option<f64>,
    /// Radius of the probing [`cluster`] run inside [`cluster2`].
    pub probe_radius: Option<f64>,
    pub metrics: RunMetrics,
    pub tau: usize,
    pub stages: Vec<StageLog>,
}

impl ClusteringResult {
    pub fn cluster_count(&self) -> usize {
        self.centers.len()
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    /// Index of each node's cluster within [`centers`](Self::centers).
    pub fn cluster_index(&self) -> Vec<usize> {
        let mut slot = vec![usize::MAX; self.assignment.len()];
        for (i, &c) in self.centers.iter().enumerate() {
            slot[c] = i;
        }
        self.assignment.iter().map(|a| slot[a.center]).collect()
    }
}

fn validate(g: &Graph, tau: usize) -> Result<()> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::validation("cannot cluster an empty graph"));
    }
    if tau == 0 || tau > n {
        return Err(Error::validation(format!("tau must lie in 1..={n}, got {tau}")));
    }
    Ok(())
}

/// Bookkeeping shared by both algorithms.
struct Builder {
    work: WorkGraph,
    states: Vec<NodeState>,
    is_center: Vec<bool>,
    assignment: Vec<Option<Assignment>>,
    uncovered: usize,
}

impl Builder {
    fn new(g: &Graph) -> Self {
        let n = g.node_count();
        Builder {
            work: WorkGraph::from_graph(g),
            states: vec![NodeState::UNSET; n],
            is_center: vec![false; n],
            assignment: vec![None; n],
            uncovered: n,
        }
    }

    fn candidates(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.work.capacity()).filter(|&u| self.work.is_active(u) && !self.is_center[u])
    }

    fn sample(&self, p: f64, rng: &Rng, attempt: u64) -> Vec<NodeId> {
        self.candidates().filter(|&u| rng.unit(u as u64, attempt) < p).collect()
    }

    /// Resets every working node: old and new centers to `(self, 0)`, the
    /// rest to unset. Returns the mask of nodes uncovered at stage start.
    fn reset(&mut self, fresh: &[NodeId], epoch: u32) -> Vec<bool> {
        let n = self.work.capacity();
        let mut tracked = vec![false; n];
        for u in self.candidates() {
            tracked[u] = true;
        }
        for u in 0..n {
            if self.work.is_active(u) {
                self.states[u] = if self.is_center[u] {
                    NodeState::center_of_itself(u, epoch)
                } else {
                    NodeState::UNSET
                };
            }
        }
        for &u in fresh {
            self.states[u] = NodeState::center_of_itself(u, epoch);
        }
        tracked
    }

    /// Records clusters for nodes covered in this stage and promotes the new
    /// centers. Returns how many previously uncovered nodes were covered.
    fn settle(&mut self, tracked: &[bool], fresh: &[NodeId]) -> usize {
        let mut covered = 0;
        for (u, &t) in tracked.iter().enumerate() {
            if t {
                if let Some(c) = self.states[u].center {
                    self.assignment[u] = Some(Assignment {
                        center: c as usize,
                        d_orig: self.states[u].d_orig,
                    });
                    covered += 1;
                }
            }
        }
        for &u in fresh {
            self.is_center[u] = true;
        }
        covered
    }

    fn finish(
        mut self,
        tau: usize,
        delta_end: Option<f64>,
        probe_radius: Option<f64>,
        metrics: RunMetrics,
        stages: Vec<StageLog>,
    ) -> ClusteringResult {
        let leftover: Vec<NodeId> = self.candidates().collect();
        for u in leftover {
            self.is_center[u] = true;
        }
        let centers: Vec<NodeId> = (0..self.is_center.len()).filter(|&u| self.is_center[u]).collect();
        for &c in &centers {
            self.assignment[c] = Some(Assignment { center: c, d_orig: 0.0 });
        }
        let assignment: Vec<Assignment> = self
            .assignment
            .into_iter()
            .map(|a| a.expect("every node is assigned"))
            .collect();
        let radius = assignment.iter().map(|a| a.d_orig).fold(0.0, f64::max);
        ClusteringResult {
            assignment,
            centers,
            radius,
            delta_end,
            probe_radius,
            metrics,
            tau,
            stages,
        }
    }
}

/// Progressive clustering with doubling Δ.
///
/// The outer loop runs while at least `8·τ·⌈log₂ n⌉` nodes are uncovered;
/// each uncovered node becomes a new center with probability
/// `γ·τ·⌈log₂ n⌉ / #uncovered`. If a stage would start with no center at
/// all, sampling is repeated with a fresh key.
pub fn cluster(g: &Graph, tau: usize, rng: &Rng, opts: &ClusterOptions) -> Result<ClusteringResult> {
    validate(g, tau)?;
    let start = Instant::now();
    let n = g.node_count();
    let log_n = ceil_log2(n) as f64;
    let threshold = 8.0 * tau as f64 * log_n;
    let mut delta = opts.delta_init.resolve(g)?;
    let budget = if opts.budget {
        StepBudget::capped(n.div_ceil(tau) as u64)?
    } else {
        StepBudget::UNLIMITED
    };
    // No simple path is heavier than all edges together; past this, doubling
    // cannot reach anything new (only possible on disconnected inputs).
    let reach_cap = g.total_weight();
    let rng = rng.substream("cluster");

    let mut b = Builder::new(g);
    let mut metrics = RunMetrics::default();
    let mut stages = Vec::new();

    while n > 1 && b.uncovered as f64 >= threshold {
        let stage = stages.len() as u32 + 1;
        let p = GAMMA * tau as f64 * log_n / b.uncovered as f64;
        let stage_rng = rng.substream_at(stage as u64);
        let has_centers = b.is_center.iter().any(|&c| c);
        let mut attempt = 0;
        let fresh = loop {
            let fresh = b.sample(p, &stage_rng, attempt);
            if !fresh.is_empty() || has_centers {
                break fresh;
            }
            attempt += 1;
        };
        metrics.rounds += 1;

        let tracked = b.reset(&fresh, stage);
        let total = b.uncovered;
        let mut steps = 0;
        let mut stop;
        loop {
            let rule = StopRule::HalfCovered { tracked: &tracked, total };
            let out = run_growth_phase(&b.work, &mut b.states, delta, rule, budget, stage);
            metrics.then(&out.metrics);
            steps += out.metrics.growing_steps;
            stop = out.stop;
            let covered = (0..n).filter(|&u| tracked[u] && b.states[u].is_covered()).count();
            if 2 * covered >= total || delta > reach_cap {
                break;
            }
            delta *= 2.0;
        }

        let covered = b.settle(&tracked, &fresh);
        metrics.rounds += 1;
        b.work = contract(&b.work, &b.states);
        b.uncovered = b.candidates().count();
        stages.push(StageLog {
            uncovered_before: total,
            new_centers: fresh.len(),
            covered,
            delta,
            growing_steps: steps,
            stop: Some(stop),
        });
    }

    metrics.wall_time = start.elapsed().as_secs_f64();
    Ok(b.finish(tau, Some(delta), None, metrics, stages))
}

/// Clustering with geometric center sampling and rescaled contraction.
/// The probing [`cluster`] run uses its own substream and its metrics are
/// included in the result.
pub fn cluster2(g: &Graph, tau: usize, rng: &Rng, opts: &ClusterOptions) -> Result<ClusteringResult> {
    validate(g, tau)?;
    let start = Instant::now();
    let probe = cluster(g, tau, &rng.substream("cluster2-probe"), opts)?;
    let two_r = 2.0 * probe.radius;
    let n = g.node_count();
    let iterations = ceil_log2(n);
    let budget = if opts.budget {
        let cap = (n as f64 / tau as f64 * iterations as f64).ceil().max(1.0);
        StepBudget::capped(cap as u64)?
    } else {
        StepBudget::UNLIMITED
    };
    let rng = rng.substream("cluster2");

    let mut b = Builder::new(g);
    let mut metrics = probe.metrics;
    let mut stages = Vec::new();

    for i in 1..=iterations {
        if b.uncovered == 0 {
            break;
        }
        let p = (2f64.powi(i as i32) / n as f64).min(1.0);
        let fresh = b.sample(p, &rng.substream_at(i as u64), 0);
        metrics.rounds += 1;

        let tracked = b.reset(&fresh, i);
        let total = b.uncovered;
        let mut stop = None;
        let mut steps = 0;
        if two_r > 0.0 {
            let out = run_growth_phase(&b.work, &mut b.states, two_r, StopRule::UntilQuiescent, budget, i);
            metrics.then(&out.metrics);
            steps = out.metrics.growing_steps;
            stop = Some(out.stop);
        }

        let covered = b.settle(&tracked, &fresh);
        metrics.rounds += 1;
        b.work = if stop == Some(StopReason::Budget) {
            contract_rescaled(&b.work, &b.states, two_r, false)?
        } else {
            contract2(&b.work, &b.states, two_r)?
        };
        b.uncovered = b.candidates().count();
        stages.push(StageLog {
            uncovered_before: total,
            new_centers: fresh.len(),
            covered,
            delta: two_r,
            growing_steps: steps,
            stop,
        });
    }

    metrics.wall_time = start.elapsed().as_secs_f64();
    Ok(b.finish(tau, None, Some(probe.radius), metrics, stages))
}

/// Removes covered non-center nodes and every edge between covered nodes;
/// an edge from covered `u` to uncovered `v` becomes an edge `(c_u, v)` of
/// the same weight whose original-scale length carries `u`'s bound.
/// Parallel edges keep the lightest, then the one with the smallest
/// original-scale length.
pub fn contract(g: &WorkGraph, states: &[NodeState]) -> WorkGraph {
    contract_with(g, states, |_, w| Ok(Some(w)))
        .expect("plain contraction never fails")
}

/// Like [`contract`], but edges heavier than `two_r` are dropped and a
/// frontier edge `(u, v)` becomes `(c_u, v)` with weight `d_u + w − two_r`.
/// The growth phase must have reached quiescence at `Δ = two_r`, which makes
/// every rescaled weight positive; a non-positive one is reported as an
/// internal error.
pub fn contract2(g: &WorkGraph, states: &[NodeState], two_r: f64) -> Result<WorkGraph> {
    contract_rescaled(g, states, two_r, true)
}

/// With `strict` unset, frontier edges whose rescaled weight would not be
/// positive (growth was cut short by the step budget) keep their weight.
fn contract_rescaled(g: &WorkGraph, states: &[NodeState], two_r: f64, strict: bool) -> Result<WorkGraph> {
    contract_with(g, states, |d_u, w| {
        if w > two_r {
            return Ok(None);
        }
        let Some(d_u) = d_u else { return Ok(Some(w)) };
        let rescaled = d_u + w - two_r;
        if rescaled > 0.0 {
            Ok(Some(rescaled))
        } else if strict {
            Err(Error::Internal(format!(
                "rescaled frontier weight {rescaled} is not positive (d_u = {d_u}, w = {w}, 2R = {two_r})"
            )))
        } else {
            Ok(Some(w))
        }
    })
}

/// `reweight(d_u, w)` maps a surviving edge to its new weight or drops it;
/// `d_u` is `Some` for frontier edges (covered tail) and `None` for edges
/// between uncovered nodes.
fn contract_with(
    g: &WorkGraph,
    states: &[NodeState],
    reweight: impl Fn(Option<f64>, f64) -> Result<Option<f64>>,
) -> Result<WorkGraph> {
    let n = g.capacity();
    let active: Vec<bool> = (0..n)
        .map(|u| g.is_active(u) && states[u].center.is_none_or(|c| c as usize == u))
        .collect();
    let mut entries: Vec<(u32, WorkEdge)> = Vec::new();
    for u in 0..n {
        if !g.is_active(u) {
            continue;
        }
        let su = states[u];
        for e in g.edges_of(u) {
            let sv = states[e.peer as usize];
            match (su.center, sv.center) {
                (None, None) => {
                    if reweight(None, e.weight)?.is_some() {
                        entries.push((u as u32, *e));
                    }
                }
                (Some(c), None) => {
                    let Some(w) = reweight(Some(su.d), e.weight)? else { continue };
                    let length = su.d_orig + e.length;
                    entries.push((c, WorkEdge { peer: e.peer, weight: w, length }));
                    entries.push((e.peer, WorkEdge { peer: c, weight: w, length }));
                }
                _ => {}
            }
        }
    }
    entries.sort_unstable_by(|a, b| {
        (a.0, a.1.peer)
            .cmp(&(b.0, b.1.peer))
            .then(a.1.weight.total_cmp(&b.1.weight))
            .then(a.1.length.total_cmp(&b.1.length))
    });
    entries.dedup_by(|next, kept| next.0 == kept.0 && next.1.peer == kept.1.peer);
    Ok(WorkGraph::from_entries(active, entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize, w: f64) -> Graph {
        Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1, w))).unwrap()
    }

    fn covered(center: usize, d: f64, d_orig: f64) -> NodeState {
        NodeState { center: Some(center as u32), d, d_orig, epoch: 1 }
    }

    #[test]
    fn small_graph_is_all_singletons() {
        let g = path(4, 1.0);
        let r = cluster(&g, 1, &Rng::new(0), &ClusterOptions::default()).unwrap();
        assert_eq!(r.centers, vec![0, 1, 2, 3]);
        assert_eq!(r.radius, 0.0);
        assert_eq!(r.stage_count(), 0);
        assert_eq!(r.metrics.rounds, 0);
        assert_eq!(r.delta_end, Some(1.0));
    }

    #[test]
    fn tau_is_validated() {
        let g = path(4, 1.0);
        let opts = ClusterOptions::default();
        assert!(cluster(&g, 0, &Rng::new(0), &opts).is_err());
        assert!(cluster(&g, 5, &Rng::new(0), &opts).is_err());
        assert!(cluster2(&g, 0, &Rng::new(0), &opts).is_err());
        let empty = Graph::from_edges(0, []).unwrap();
        assert!(cluster(&empty, 1, &Rng::new(0), &opts).is_err());
        let opts = ClusterOptions { delta_init: DeltaInit::Value(-1.0), budget: false };
        assert!(cluster(&g, 1, &Rng::new(0), &opts).is_err());
    }

    #[test]
    fn single_node() {
        let g = Graph::from_edges(1, []).unwrap();
        for r in [
            cluster(&g, 1, &Rng::new(0), &ClusterOptions::default()).unwrap(),
            cluster2(&g, 1, &Rng::new(0), &ClusterOptions::default()).unwrap(),
        ] {
            assert_eq!(r.centers, vec![0]);
            assert_eq!(r.radius, 0.0);
        }
    }

    #[test]
    fn contract_path() {
        // a - b - c, a center, b covered at distance 1, c uncovered.
        let g = WorkGraph::from_graph(&path(3, 1.0));
        let states = [covered(0, 0.0, 0.0), covered(0, 1.0, 1.0), NodeState::UNSET];
        let c = contract(&g, &states);
        assert!(c.is_active(0) && !c.is_active(1) && c.is_active(2));
        assert_eq!(c.edges_of(0), &[WorkEdge { peer: 2, weight: 1.0, length: 2.0 }]);
        assert_eq!(c.edges_of(0)[0].offset(), 1.0);
        assert_eq!(c.edges_of(2), &[WorkEdge { peer: 0, weight: 1.0, length: 2.0 }]);
        assert!(c.edges_of(1).is_empty());
    }

    #[test]
    fn contract_fully_covered() {
        let g = WorkGraph::from_graph(&path(3, 1.0));
        let states = [covered(0, 0.0, 0.0), covered(0, 1.0, 1.0), covered(0, 2.0, 2.0)];
        let c = contract(&g, &states);
        assert_eq!(c.active_count(), 1);
        assert_eq!(c.edge_entries(), 0);
    }

    #[test]
    fn contract_drops_inter_cluster_edges() {
        let g = WorkGraph::from_graph(&Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap());
        let states = [covered(0, 0.0, 0.0), covered(0, 1.0, 1.0), covered(2, 0.0, 0.0)];
        let c = contract(&g, &states);
        assert_eq!(c.active_count(), 2);
        assert_eq!(c.edge_entries(), 0);
    }

    #[test]
    fn contract_collapses_parallel_edges() {
        // 1 and 2 both belong to center 0 and both touch uncovered 3.
        let g = WorkGraph::from_graph(
            &Graph::from_edges(4, [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 2.0), (2, 3, 1.5)]).unwrap(),
        );
        let states = [covered(0, 0.0, 0.0), covered(0, 1.0, 1.0), covered(0, 1.0, 1.0), NodeState::UNSET];
        let c = contract(&g, &states);
        assert_eq!(c.edges_of(0), &[WorkEdge { peer: 3, weight: 1.5, length: 2.5 }]);
    }

    #[test]
    fn contract2_rescales() {
        // u covered with d = D = 3, edge of weight 2 to uncovered v, 2R = 4.
        let g = WorkGraph::from_graph(&Graph::from_edges(3, [(0, 1, 3.0), (1, 2, 2.0)]).unwrap());
        let states = [covered(0, 0.0, 0.0), covered(0, 3.0, 3.0), NodeState::UNSET];
        let c = contract2(&g, &states, 4.0).unwrap();
        assert_eq!(c.edges_of(0), &[WorkEdge { peer: 2, weight: 1.0, length: 5.0 }]);
        assert_eq!(c.edges_of(0)[0].offset(), 4.0);
    }

    #[test]
    fn contract2_drops_heavy_edges() {
        let g = WorkGraph::from_graph(&Graph::from_edges(3, [(0, 1, 10.0), (1, 2, 10.0)]).unwrap());
        let states = [covered(0, 0.0, 0.0), NodeState::UNSET, NodeState::UNSET];
        let c = contract2(&g, &states, 4.0).unwrap();
        assert_eq!(c.edge_entries(), 0);
        assert_eq!(c.active_count(), 3);
    }

    #[test]
    fn contract2_rejects_non_quiescent_state() {
        // v is within reach (0 + 1 <= 4) yet uncovered.
        let g = WorkGraph::from_graph(&path(2, 1.0));
        let states = [covered(0, 0.0, 0.0), NodeState::UNSET];
        assert!(matches!(contract2(&g, &states, 4.0), Err(Error::Internal(_))));
        let relaxed = contract_rescaled(&g, &states, 4.0, false).unwrap();
        assert_eq!(relaxed.edges_of(0)[0].weight, 1.0);
    }

    #[test]
    fn cluster_is_total_and_seeded() {
        let g = crate::graph::assign_weights(
            &crate::graph::mesh(24).unwrap(),
            crate::graph::WeightModel::Uniform,
            &Rng::new(9),
        )
        .unwrap();
        let opts = ClusterOptions::default();
        let a = cluster(&g, 1, &Rng::new(4), &opts).unwrap();
        let mut b = cluster(&g, 1, &Rng::new(4), &opts).unwrap();
        b.metrics.wall_time = a.metrics.wall_time;
        assert_eq!(a, b);
        assert!(a.stage_count() > 0);
        for (u, asg) in a.assignment.iter().enumerate() {
            assert_eq!(a.assignment[asg.center].center, asg.center, "node {u}");
        }
        for &c in &a.centers {
            assert_eq!(a.assignment[c].d_orig, 0.0);
        }
        for s in &a.stages {
            assert!(2 * s.covered >= s.uncovered_before, "{s:?}");
        }
        let delta_end = a.delta_end.unwrap();
        assert!(a.radius <= a.stage_count() as f64 * 2.0 * delta_end);

        let c2 = cluster2(&g, 1, &Rng::new(4), &opts).unwrap();
        assert!(c2.probe_radius.is_some());
        assert!(c2.metrics.rounds > a.metrics.rounds);
        assert!(c2.stage_count() <= ceil_log2(g.node_count()) as usize);
    }

    #[test]
    fn budget_caps_phases() {
        let g = crate::graph::assign_weights(
            &crate::graph::mesh(24).unwrap(),
            crate::graph::WeightModel::Uniform,
            &Rng::new(2),
        )
        .unwrap();
        let opts = ClusterOptions { budget: true, ..ClusterOptions::default() };
        let tau = 2;
        let r = cluster(&g, tau, &Rng::new(1), &opts).unwrap();
        let cap = g.node_count().div_ceil(tau) as u64;
        assert!(r.stages.iter().all(|s| s.growing_steps <= cap * 64));
        let r2 = cluster2(&g, tau, &Rng::new(1), &opts).unwrap();
        assert_eq!(r2.assignment.len(), g.node_count());
    }
}
