//! Quotient graph of a clustering and the conservative diameter estimate
//! `Φ(G_C) + 2·radius`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use ordered_float::OrderedFloat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{cluster, cluster2, ClusterOptions, ClusteringResult};
use crate::engine::RunMetrics;
use crate::error::{Error, Result};
use crate::graph::{component_members, connected_components, Graph, NodeId};
use crate::rng::Rng;

/// Quotient graphs above this many nodes are rejected.
pub const DEFAULT_QUOTIENT_LIMIT: usize = 100_000;
/// Quotient graphs up to this many nodes get an exact diameter.
pub const DEFAULT_EXACT_LIMIT: usize = 4096;

/// One node per cluster. An original edge `(u, v)` between different
/// clusters induces a quotient edge of weight `w(u, v) + d_u + d_v`; the
/// lightest candidate per cluster pair is kept.
#[derive(Clone, Debug)]
pub struct QuotientGraph {
    pub graph: Graph,
    /// Center of each quotient node.
    pub centers: Vec<NodeId>,
    /// Number of original edges that crossed clusters.
    pub crossing_edges: usize,
}

pub fn build_quotient(g: &Graph, c: &ClusteringResult) -> Result<QuotientGraph> {
    if c.assignment.len() != g.node_count() {
        return Err(Error::validation("clustering does not cover the graph"));
    }
    let slot = c.cluster_index();
    let mut crossing_edges = 0;
    let candidates: Vec<(NodeId, NodeId, f64)> = g
        .edges()
        .filter(|&(u, v, _)| slot[u] != slot[v])
        .map(|(u, v, w)| {
            crossing_edges += 1;
            (slot[u], slot[v], w + c.assignment[u].d_orig + c.assignment[v].d_orig)
        })
        .collect();
    Ok(QuotientGraph {
        graph: Graph::from_edges(c.centers.len(), candidates)?,
        centers: c.centers.clone(),
        crossing_edges,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuotientMode {
    /// Maximum over all sources of the largest finite distance.
    Exact,
    /// Twice the eccentricity of one node per component, an upper bound
    /// within a factor two.
    DoubledEccentricity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientDiameter {
    pub value: f64,
    pub mode: QuotientMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientLimits {
    pub max_nodes: usize,
    pub exact_up_to: usize,
}

impl Default for QuotientLimits {
    fn default() -> Self {
        QuotientLimits {
            max_nodes: DEFAULT_QUOTIENT_LIMIT,
            exact_up_to: DEFAULT_EXACT_LIMIT,
        }
    }
}

pub fn quotient_diameter(q: &QuotientGraph, limits: &QuotientLimits) -> Result<QuotientDiameter> {
    let n = q.graph.node_count();
    if n > limits.max_nodes {
        return Err(Error::TooLarge {
            what: "quotient graph",
            size: n,
            limit: limits.max_nodes,
            hint: "; use a larger tau",
        });
    }
    if n <= limits.exact_up_to {
        let value = (0..n)
            .into_par_iter()
            .map(|s| eccentricity(&q.graph, s))
            .reduce(|| 0.0, f64::max);
        return Ok(QuotientDiameter { value, mode: QuotientMode::Exact });
    }
    let labels = connected_components(&q.graph);
    let value = component_members(&labels)
        .par_iter()
        .map(|members| 2.0 * eccentricity(&q.graph, members[0]))
        .reduce(|| 0.0, f64::max);
    Ok(QuotientDiameter { value, mode: QuotientMode::DoubledEccentricity })
}

/// Largest finite distance from `source`.
fn eccentricity(g: &Graph, source: NodeId) -> f64 {
    let mut dist = vec![f64::INFINITY; g.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((OrderedFloat(0.0), source)));
    let mut ecc = 0.0f64;
    while let Some(Reverse((OrderedFloat(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        ecc = ecc.max(d);
        for (v, w) in g.neighbors(u) {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((OrderedFloat(nd), v)));
            }
        }
    }
    ecc
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Single clustering pass (the practical pipeline).
    #[default]
    Cluster,
    /// Clustering pass followed by geometric resampling with rescaled
    /// contraction.
    Cluster2,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiameterOptions {
    pub algorithm: Algorithm,
    pub cluster: ClusterOptions,
    pub limits: QuotientLimits,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterEstimate {
    pub phi_approx: f64,
    /// `Φ(G_C)` of the component that attains `phi_approx`.
    pub phi_quotient: f64,
    /// Clustering radius of that component.
    pub radius: f64,
    pub cluster_count: usize,
    pub components: usize,
    pub quotient_mode: QuotientMode,
    /// Final Δ of the largest component's clustering, when available.
    pub delta_end: Option<f64>,
    pub metrics: RunMetrics,
}

/// Per-component result, for callers that need the clustering itself.
#[derive(Clone, Debug)]
pub struct ComponentRun {
    /// Original ids of the component's nodes, increasing.
    pub nodes: Vec<NodeId>,
    pub tau: usize,
    pub clustering: ClusteringResult,
    pub quotient: QuotientDiameter,
}

/// Clusters each connected component, measures its quotient graph, and
/// returns the largest `Φ(G_C) + 2·radius`. `tau` is split across
/// components in proportion to their size, at least 1 each. Components run
/// side by side: rounds take the maximum, work adds up. Quotient
/// construction and the quotient diameter each add one round; building the
/// quotient sends one message per crossing edge.
pub fn approximate_diameter(
    g: &Graph,
    tau: usize,
    rng: &Rng,
    opts: &DiameterOptions,
) -> Result<DiameterEstimate> {
    approximate_diameter_detailed(g, tau, rng, opts).map(|(e, _)| e)
}

pub fn approximate_diameter_detailed(
    g: &Graph,
    tau: usize,
    rng: &Rng,
    opts: &DiameterOptions,
) -> Result<(DiameterEstimate, Vec<ComponentRun>)> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::validation("graph has no nodes"));
    }
    if tau == 0 || tau > n {
        return Err(Error::validation(format!("tau must lie in 1..={n}, got {tau}")));
    }
    let start = Instant::now();
    let groups = component_members(&connected_components(g));
    let single = groups.len() == 1;

    let mut runs = Vec::with_capacity(groups.len());
    for (idx, nodes) in groups.into_iter().enumerate() {
        let share = ((tau as f64 * nodes.len() as f64 / n as f64).round() as usize).clamp(1, nodes.len());
        let sub;
        let graph = if single {
            g
        } else {
            sub = g.induced(&nodes);
            &sub
        };
        let comp_rng = rng.substream_at(idx as u64);
        let clustering = match opts.algorithm {
            Algorithm::Cluster => cluster(graph, share, &comp_rng, &opts.cluster)?,
            Algorithm::Cluster2 => cluster2(graph, share, &comp_rng, &opts.cluster)?,
        };
        let quotient = build_quotient(graph, &clustering)?;
        let qd = quotient_diameter(&quotient, &opts.limits)?;
        let mut clustering = clustering;
        clustering.metrics.rounds += 2;
        clustering.metrics.messages += quotient.crossing_edges as u64;
        runs.push(ComponentRun { nodes, tau: share, clustering, quotient: qd });
    }

    let mut metrics = RunMetrics::default();
    let mut best: Option<&ComponentRun> = None;
    let mut best_phi = f64::NEG_INFINITY;
    for run in &runs {
        metrics.alongside(&run.clustering.metrics);
        let phi = run.quotient.value + 2.0 * run.clustering.radius;
        if phi > best_phi {
            best_phi = phi;
            best = Some(run);
        }
    }
    let best = best.expect("at least one component");
    let largest = runs.iter().max_by_key(|r| (r.nodes.len(), Reverse(r.nodes[0]))).expect("non-empty");
    metrics.wall_time = start.elapsed().as_secs_f64();
    let estimate = DiameterEstimate {
        phi_approx: best_phi,
        phi_quotient: best.quotient.value,
        radius: best.clustering.radius,
        cluster_count: runs.iter().map(|r| r.clustering.cluster_count()).sum(),
        components: runs.len(),
        quotient_mode: if runs.iter().all(|r| r.quotient.mode == QuotientMode::Exact) {
            QuotientMode::Exact
        } else {
            QuotientMode::DoubledEccentricity
        },
        delta_end: largest.clustering.delta_end,
        metrics,
    };
    Ok((estimate, runs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::Assignment;

    fn clustering(assign: &[(usize, f64)]) -> ClusteringResult {
        let mut centers: Vec<usize> = assign.iter().map(|a| a.0).collect();
        centers.sort_unstable();
        centers.dedup();
        ClusteringResult {
            assignment: assign.iter().map(|&(center, d_orig)| Assignment { center, d_orig }).collect(),
            centers,
            radius: assign.iter().map(|a| a.1).fold(0.0, f64::max),
            delta_end: None,
            probe_radius: None,
            metrics: RunMetrics::default(),
            tau: 1,
            stages: Vec::new(),
        }
    }

    #[test]
    fn quotient_edge_weight() {
        // A = {u(0), v(1)}, B = {w(0)}, edge (v, w) of weight 2.
        let g = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let c = clustering(&[(0, 0.0), (0, 1.0), (2, 0.0)]);
        let q = build_quotient(&g, &c).unwrap();
        assert_eq!(q.graph.edges().collect::<Vec<_>>(), vec![(0, 1, 3.0)]);
        assert_eq!(q.centers, vec![0, 2]);
        assert_eq!(q.crossing_edges, 1);
    }

    #[test]
    fn singleton_quotient_is_the_graph() {
        let g = Graph::from_edges(4, [(0, 1, 1.5), (1, 2, 2.5), (2, 3, 0.5), (0, 3, 4.0)]).unwrap();
        let c = clustering(&[(0, 0.0), (1, 0.0), (2, 0.0), (3, 0.0)]);
        let q = build_quotient(&g, &c).unwrap();
        assert_eq!(q.graph.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn parallel_candidates_keep_minimum() {
        // Clusters {0, 1} and {2, 3}; candidate weights 3 and 5.
        let g = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0), (0, 2, 3.0), (1, 3, 3.0)]).unwrap();
        let c = clustering(&[(0, 0.0), (0, 1.0), (2, 0.0), (2, 1.0)]);
        let q = build_quotient(&g, &c).unwrap();
        assert_eq!(q.graph.edges().collect::<Vec<_>>(), vec![(0, 1, 3.0)]);
    }

    fn quotient_of(g: Graph) -> QuotientGraph {
        let n = g.node_count();
        QuotientGraph { graph: g, centers: (0..n).collect(), crossing_edges: 0 }
    }

    #[test]
    fn quotient_diameter_modes() {
        let single = quotient_of(Graph::from_edges(1, []).unwrap());
        assert_eq!(quotient_diameter(&single, &QuotientLimits::default()).unwrap().value, 0.0);

        let path = quotient_of(Graph::from_edges(3, [(0, 1, 2.0), (1, 2, 3.0)]).unwrap());
        let exact = quotient_diameter(&path, &QuotientLimits::default()).unwrap();
        assert_eq!((exact.value, exact.mode), (5.0, QuotientMode::Exact));

        let approx_limits = QuotientLimits { max_nodes: 10, exact_up_to: 0 };
        let approx = quotient_diameter(&path, &approx_limits).unwrap();
        assert_eq!((approx.value, approx.mode), (10.0, QuotientMode::DoubledEccentricity));

        let tiny = QuotientLimits { max_nodes: 2, exact_up_to: 2 };
        assert!(matches!(quotient_diameter(&path, &tiny), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn disconnected_quotient_takes_component_max() {
        let q = quotient_of(Graph::from_edges(4, [(0, 1, 7.0), (2, 3, 3.0)]).unwrap());
        assert_eq!(quotient_diameter(&q, &QuotientLimits::default()).unwrap().value, 7.0);
    }

    #[test]
    fn one_cluster_gives_twice_the_radius() {
        let g = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let c = clustering(&[(1, 1.0), (1, 0.0), (1, 2.0)]);
        let q = build_quotient(&g, &c).unwrap();
        let qd = quotient_diameter(&q, &QuotientLimits::default()).unwrap();
        assert_eq!(qd.value + 2.0 * c.radius, 4.0);
    }

    #[test]
    fn tiny_graph_estimate_is_exact() {
        let g = Graph::from_edges(4, [(0, 1, 2.0), (1, 2, 3.0), (2, 3, 1.0)]).unwrap();
        let est = approximate_diameter(&g, 1, &Rng::new(1), &DiameterOptions::default()).unwrap();
        assert_eq!(est.phi_approx, 6.0);
        assert_eq!(est.phi_approx, est.phi_quotient + 2.0 * est.radius);
        assert_eq!(est.cluster_count, 4);
    }

    #[test]
    fn per_component_maximum() {
        let g = Graph::from_edges(5, [(0, 1, 7.0), (2, 3, 3.0)]).unwrap();
        let est = approximate_diameter(&g, 2, &Rng::new(1), &DiameterOptions::default()).unwrap();
        assert_eq!(est.phi_approx, 7.0);
        assert_eq!(est.components, 3);
    }
}
