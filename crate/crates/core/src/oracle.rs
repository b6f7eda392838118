//! Brute-force reference computations.
//!
//! Everything here is written against [`Graph`] alone and shares no code
//! with the growing engine, the clustering or Δ-stepping, so that it can be
//! used to check them. All routines are exact and refuse inputs beyond a
//! size cap.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use ordered_float::OrderedFloat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

pub const DIAMETER_CAP: usize = 5000;
pub const CLUSTER_RADIUS_MAX_NODES: usize = 12;
pub const CLUSTER_RADIUS_MAX_TAU: usize = 3;
pub const HOP_RADIUS_CAP: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMethod {
    DijkstraApsp,
    ExhaustiveClustering,
    HopMinimalDijkstra,
}

impl OracleMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleMethod::DijkstraApsp => "dijkstra-apsp",
            OracleMethod::ExhaustiveClustering => "exhaustive-clustering",
            OracleMethod::HopMinimalDijkstra => "hop-minimal-dijkstra",
        }
    }
}

/// One oracle evaluation, kept for audit trails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub quantity: String,
    pub value: f64,
    pub method: OracleMethod,
    /// Node count of the instance.
    pub size: usize,
    /// Seconds.
    pub runtime: f64,
}

impl OracleReport {
    /// Times `f` and wraps its value.
    pub fn measure(
        quantity: &str,
        method: OracleMethod,
        g: &Graph,
        f: impl FnOnce() -> Result<f64>,
    ) -> Result<OracleReport> {
        let start = Instant::now();
        let value = f()?;
        Ok(OracleReport {
            quantity: quantity.to_string(),
            value,
            method,
            size: g.node_count(),
            runtime: start.elapsed().as_secs_f64(),
        })
    }
}

fn cap(what: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit {
        return Err(Error::TooLarge {
            what,
            size,
            limit,
            hint: "",
        });
    }
    Ok(())
}

/// Binary-heap Dijkstra. Unreachable nodes get `f64::INFINITY`.
///
/// ```
/// use cldiam::{oracle, Graph};
/// let g = Graph::from_edges(4, [(0, 1, 2.0), (1, 2, 3.0)]).unwrap();
/// assert_eq!(oracle::dijkstra(&g, 0), vec![0.0, 2.0, 5.0, f64::INFINITY]);
/// ```
pub fn dijkstra(g: &Graph, source: NodeId) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((OrderedFloat(0.0), source)));
    while let Some(Reverse((OrderedFloat(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for (v, w) in g.neighbors(u) {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((OrderedFloat(nd), v)));
            }
        }
    }
    dist
}

fn finite_max(dist: &[f64]) -> f64 {
    dist.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max)
}

/// Largest distance between two nodes of the same component.
pub fn exact_diameter(g: &Graph) -> Result<f64> {
    exact_diameter_with_cap(g, DIAMETER_CAP)
}

pub fn exact_diameter_with_cap(g: &Graph, limit: usize) -> Result<f64> {
    cap("exact diameter", g.node_count(), limit)?;
    Ok((0..g.node_count())
        .into_par_iter()
        .map(|s| finite_max(&dijkstra(g, s)))
        .reduce(|| 0.0, f64::max))
}

/// The minimum radius over all clusterings with at most `tau` clusters,
/// found by trying every center set and sending each node to its nearest
/// center. Nodes in components without a center make a center set
/// infeasible.
pub fn optimal_cluster_radius(g: &Graph, tau: usize) -> Result<f64> {
    let n = g.node_count();
    cap("cluster radius search", n, CLUSTER_RADIUS_MAX_NODES)?;
    cap("cluster radius search (tau)", tau, CLUSTER_RADIUS_MAX_TAU)?;
    if tau == 0 {
        return Err(Error::validation("tau must be at least 1"));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let apsp: Vec<Vec<f64>> = (0..n).map(|s| dijkstra(g, s)).collect();
    let k = tau.min(n);
    let mut best = f64::INFINITY;
    let mut set: Vec<usize> = (0..k).collect();
    loop {
        let radius = (0..n)
            .map(|v| set.iter().map(|&c| apsp[c][v]).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        best = best.min(radius);
        // Advance to the next k-subset in lexicographic order.
        let mut i = k;
        while i > 0 && set[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        set[i - 1] += 1;
        for j in i..k {
            set[j] = set[j - 1] + 1;
        }
    }
    if best.is_infinite() {
        return Err(Error::validation(format!(
            "no clustering with {tau} clusters covers every component"
        )));
    }
    Ok(best)
}

/// Hop count of the fewest-edge path among minimum-weight paths, from
/// `source` to every node.
fn hop_minimal(g: &Graph, source: NodeId) -> Vec<(f64, u64)> {
    let mut best = vec![(f64::INFINITY, u64::MAX); g.node_count()];
    let mut heap = BinaryHeap::new();
    best[source] = (0.0, 0);
    heap.push(Reverse((OrderedFloat(0.0), 0u64, source)));
    while let Some(Reverse((OrderedFloat(d), h, u))) = heap.pop() {
        if (d, h) > best[u] {
            continue;
        }
        for (v, w) in g.neighbors(u) {
            let cand = (d + w, h + 1);
            if cand < best[v] {
                best[v] = cand;
                heap.push(Reverse((OrderedFloat(cand.0), cand.1, v)));
            }
        }
    }
    best
}

/// Over all pairs at distance at most `delta`, the largest hop count of a
/// fewest-edge minimum-weight path between them.
pub fn hop_radius(g: &Graph, delta: f64) -> Result<u64> {
    cap("hop radius", g.node_count(), HOP_RADIUS_CAP)?;
    Ok((0..g.node_count())
        .into_par_iter()
        .map(|s| {
            hop_minimal(g, s)
                .into_iter()
                .filter(|&(d, _)| d <= delta)
                .map(|(_, h)| h)
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i, 1.0))).unwrap()
    }

    #[test]
    fn dijkstra_on_path() {
        let g = Graph::from_edges(3, [(0, 1, 2.0), (1, 2, 3.0)]).unwrap();
        assert_eq!(dijkstra(&g, 0), vec![0.0, 2.0, 5.0]);
        assert_eq!(dijkstra(&g, 1), vec![2.0, 0.0, 3.0]);
    }

    #[test]
    fn diameters() {
        let g = Graph::from_edges(3, [(0, 1, 2.0), (1, 2, 3.0)]).unwrap();
        assert_eq!(exact_diameter(&g).unwrap(), 5.0);
        let two = Graph::from_edges(4, [(0, 1, 7.0), (2, 3, 3.0)]).unwrap();
        assert_eq!(exact_diameter(&two).unwrap(), 7.0);
        assert_eq!(exact_diameter(&Graph::from_edges(1, []).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn diameter_cap() {
        let g = unit_path(10);
        assert!(matches!(exact_diameter_with_cap(&g, 9), Err(Error::TooLarge { .. })));
        assert_eq!(exact_diameter_with_cap(&g, 10).unwrap(), 9.0);
    }

    #[test]
    fn cluster_radius_on_paths() {
        assert_eq!(optimal_cluster_radius(&unit_path(3), 1).unwrap(), 1.0);
        assert_eq!(optimal_cluster_radius(&unit_path(3), 3).unwrap(), 0.0);
        assert_eq!(optimal_cluster_radius(&unit_path(5), 2).unwrap(), 1.0);
        assert_eq!(optimal_cluster_radius(&unit_path(5), 1).unwrap(), 2.0);
        assert_eq!(optimal_cluster_radius(&unit_path(2), 3).unwrap(), 0.0);
    }

    #[test]
    fn cluster_radius_needs_a_center_per_component() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 2.0)]).unwrap();
        assert!(optimal_cluster_radius(&g, 1).is_err());
        assert_eq!(optimal_cluster_radius(&g, 2).unwrap(), 2.0);
    }

    #[test]
    fn cluster_radius_caps() {
        assert!(optimal_cluster_radius(&unit_path(13), 1).is_err());
        assert!(optimal_cluster_radius(&unit_path(5), 4).is_err());
        assert!(optimal_cluster_radius(&unit_path(5), 0).is_err());
    }

    #[test]
    fn hop_radius_examples() {
        assert_eq!(hop_radius(&unit_path(10), 3.0).unwrap(), 3);
        let edge = Graph::from_edges(2, [(0, 1, 5.0)]).unwrap();
        assert_eq!(hop_radius(&edge, 4.0).unwrap(), 0);
        assert_eq!(hop_radius(&edge, 5.0).unwrap(), 1);
    }

    #[test]
    fn hop_radius_prefers_fewer_hops_among_equal_weights() {
        // 0-1-2 with weights 1,1 and a direct 0-2 edge of weight 2.
        let g = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 2.0)]).unwrap();
        assert_eq!(hop_radius(&g, 2.0).unwrap(), 1);
    }

    #[test]
    fn hop_radius_is_monotone() {
        let g = unit_path(12);
        let hops: Vec<u64> = (0..14).map(|d| hop_radius(&g, d as f64 * 0.75).unwrap()).collect();
        assert!(hops.windows(2).all(|w| w[0] <= w[1]), "{hops:?}");
    }

    #[test]
    fn report() {
        let g = unit_path(4);
        let r = OracleReport::measure("diameter", OracleMethod::DijkstraApsp, &g, || exact_diameter(&g)).unwrap();
        assert_eq!(r.value, 3.0);
        assert_eq!(r.size, 4);
        assert_eq!(r.method.as_str(), "dijkstra-apsp");
        let json = serde_json::to_string(&r.method).unwrap();
        assert_eq!(json, "\"dijkstra-apsp\"");
    }
}
