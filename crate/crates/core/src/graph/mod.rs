//! Immutable undirected weighted graphs in compressed adjacency form.

mod gen;
mod io;
mod weights;

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub use gen::{mesh, rmat, roads_product, RMAT_PROBABILITIES};
pub use io::{
    load_binary, load_dimacs_gr, load_edge_list, read_binary, read_dimacs_gr, read_edge_list,
    save_binary, write_binary, write_dimacs_gr, write_edge_list, BINARY_MAGIC, BINARY_VERSION,
};
pub use weights::{assign_weights, WeightModel};

pub type NodeId = usize;

/// Undirected graph with strictly positive weights.
///
/// Every edge is stored in both endpoints' adjacency lists with the same
/// weight, lists are sorted by neighbor id, there are no self-loops and at
/// most one edge per node pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    edge_count: usize,
    label: Option<String>,
}

impl Graph {
    /// Builds a graph from undirected edges. Self-loops are dropped and
    /// parallel edges collapse to their minimum weight.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        if node_count > u32::MAX as usize {
            return Err(Error::validation(format!(
                "{node_count} nodes exceed the 32-bit id space"
            )));
        }
        let mut list: Vec<(u32, u32, f64)> = Vec::new();
        for (u, v, w) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) references a node outside 0..{node_count}"
                )));
            }
            check_weight(w)?;
            if u == v {
                continue;
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            list.push((a as u32, b as u32, w));
        }
        list.sort_unstable_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)).then(x.2.total_cmp(&y.2)));
        list.dedup_by(|next, kept| next.0 == kept.0 && next.1 == kept.1);
        Ok(Self::from_sorted_unique(node_count, &list))
    }

    fn from_sorted_unique(node_count: usize, list: &[(u32, u32, f64)]) -> Self {
        let mut degree = vec![0usize; node_count + 1];
        for &(a, b, _) in list {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        let mut acc = 0;
        offsets.push(0);
        for d in &degree[..node_count] {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; acc];
        let mut weights = vec![0f64; acc];
        // `list` is sorted by (min, max): every node receives its lower
        // neighbors in increasing order before any higher neighbor.
        for &(a, b, w) in list {
            let (a, b) = (a as usize, b as usize);
            targets[cursor[a]] = b as u32;
            weights[cursor[a]] = w;
            cursor[a] += 1;
            targets[cursor[b]] = a as u32;
            weights[cursor[b]] = w;
            cursor[b] += 1;
        }
        Graph {
            offsets,
            targets,
            weights,
            edge_count: list.len(),
            label: None,
        }
    }

    /// Assembles a graph from raw CSR arrays, checking every invariant.
    pub fn from_csr(offsets: Vec<usize>, targets: Vec<u32>, weights: Vec<f64>) -> Result<Self> {
        if offsets.first() != Some(&0)
            || offsets.windows(2).any(|w| w[0] > w[1])
            || offsets.last() != Some(&targets.len())
            || targets.len() != weights.len()
        {
            return Err(Error::validation("inconsistent CSR arrays"));
        }
        let n = offsets.len() - 1;
        let g = Graph {
            offsets,
            targets,
            weights,
            edge_count: 0,
            label: None,
        };
        let mut half_edges = 0usize;
        for u in 0..n {
            let mut prev: Option<usize> = None;
            for (v, w) in g.neighbors(u) {
                check_weight(w)?;
                if v >= n || v == u || prev.is_some_and(|p| p >= v) {
                    return Err(Error::validation(format!("bad adjacency entry {u} -> {v}")));
                }
                prev = Some(v);
                if g.edge_weight(v, u) != Some(w) {
                    return Err(Error::validation(format!("edge ({u}, {v}) is not symmetric")));
                }
                half_edges += 1;
            }
        }
        Ok(Graph {
            edge_count: half_edges / 2,
            ..g
        })
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// `(neighbor, weight)` pairs in increasing neighbor order.
    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let range = self.offsets[u]..self.offsets[u + 1];
        self.targets[range.clone()]
            .iter()
            .map(|&v| v as usize)
            .zip(self.weights[range].iter().copied())
    }

    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        let range = self.offsets[u]..self.offsets[u + 1];
        let slice = &self.targets[range.clone()];
        slice
            .binary_search(&(v as u32))
            .ok()
            .map(|i| self.weights[range.start + i])
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`, in `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count())
            .flat_map(move |u| self.neighbors(u).filter(move |&(v, _)| u < v).map(move |(v, w)| (u, v, w)))
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.weights.iter().copied().reduce(f64::min)
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.weights.iter().copied().reduce(f64::max)
    }

    /// Arithmetic mean over undirected edges, summed in `(u, v)` order.
    pub fn mean_weight(&self) -> Option<f64> {
        if self.edge_count == 0 {
            return None;
        }
        Some(self.total_weight() / self.edge_count as f64)
    }

    /// Sum over undirected edges, in `(u, v)` order.
    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    /// Replaces every edge weight by `f(u, v, w)` with `u < v`, keeping symmetry.
    pub fn map_weights(&self, mut f: impl FnMut(NodeId, NodeId, f64) -> f64) -> Result<Self> {
        let mut out = self.clone();
        for u in 0..self.node_count() {
            for i in self.offsets[u]..self.offsets[u + 1] {
                let v = self.targets[i] as usize;
                if u < v {
                    let w = f(u, v, self.weights[i]);
                    check_weight(w)?;
                    out.weights[i] = w;
                }
            }
        }
        for u in 0..self.node_count() {
            for i in self.offsets[u]..self.offsets[u + 1] {
                let v = self.targets[i] as usize;
                if u > v {
                    out.weights[i] = out.edge_weight(v, u).expect("symmetric adjacency");
                }
            }
        }
        Ok(out)
    }

    /// Subgraph induced by `nodes` (given in increasing order); node `i` of
    /// the result is `nodes[i]`.
    pub fn induced(&self, nodes: &[NodeId]) -> Self {
        let mut local = vec![u32::MAX; self.node_count()];
        for (i, &u) in nodes.iter().enumerate() {
            local[u] = i as u32;
        }
        let mut list = Vec::new();
        for (i, &u) in nodes.iter().enumerate() {
            for (v, w) in self.neighbors(u) {
                let j = local[v];
                if j != u32::MAX && (i as u32) < j {
                    list.push((i as u32, j, w));
                }
            }
        }
        list.sort_unstable_by_key(|e| (e.0, e.1));
        let mut g = Self::from_sorted_unique(nodes.len(), &list);
        g.label = self.label.clone();
        g
    }
}

pub(crate) fn check_weight(w: f64) -> Result<()> {
    if w.is_finite() && w > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(format!(
            "edge weight {w} is not a positive finite number"
        )))
    }
}

/// Component label per node: the smallest node id in its component.
pub fn connected_components(g: &Graph) -> Vec<NodeId> {
    let n = g.node_count();
    let mut label = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = s;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for (v, _) in g.neighbors(u) {
                if label[v] == usize::MAX {
                    label[v] = s;
                    queue.push_back(v);
                }
            }
        }
    }
    label
}

/// Nodes grouped by component, components ordered by their smallest id.
pub fn component_members(labels: &[NodeId]) -> Vec<Vec<NodeId>> {
    let mut slot = vec![usize::MAX; labels.len()];
    let mut groups: Vec<Vec<NodeId>> = Vec::new();
    for (u, &l) in labels.iter().enumerate() {
        if slot[l] == usize::MAX {
            slot[l] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[l]].push(u);
    }
    groups
}

/// `⌈log₂ n⌉`, with `log(1) = 0`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(weights: &[f64]) -> Graph {
        Graph::from_edges(
            weights.len() + 1,
            weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w)),
        )
        .unwrap()
    }

    #[test]
    fn symmetric_storage() {
        let g = path(&[2.5, 1.0]);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge_weight(0, 1), Some(2.5));
        assert_eq!(g.edge_weight(1, 0), Some(2.5));
        assert_eq!(g.edge_weight(0, 2), None);
        assert_eq!(g.neighbors(1).collect::<Vec<_>>(), vec![(0, 2.5), (2, 1.0)]);
    }

    #[test]
    fn collapse_and_self_loops() {
        let g = Graph::from_edges(3, [(0, 1, 5.0), (1, 0, 7.0), (2, 2, 1.0), (1, 2, 3.0), (2, 1, 2.0)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge_weight(0, 1), Some(5.0));
        assert_eq!(g.edge_weight(2, 1), Some(2.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Graph::from_edges(2, [(0, 2, 1.0)]).is_err());
        assert!(Graph::from_edges(2, [(0, 1, 0.0)]).is_err());
        assert!(Graph::from_edges(2, [(0, 1, -1.0)]).is_err());
        assert!(Graph::from_edges(2, [(0, 1, f64::INFINITY)]).is_err());
        assert!(Graph::from_edges(2, [(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn adjacency_sorted_for_unsorted_input() {
        let g = Graph::from_edges(4, [(3, 0, 1.0), (2, 0, 1.0), (1, 0, 1.0), (3, 1, 1.0)]).unwrap();
        for u in 0..4 {
            let ids: Vec<_> = g.neighbors(u).map(|p| p.0).collect();
            assert!(ids.windows(2).all(|w| w[0] < w[1]), "{u}: {ids:?}");
        }
        assert_eq!(Graph::from_csr(g.offsets.clone(), g.targets.clone(), g.weights.clone()).unwrap(), g);
    }

    #[test]
    fn components() {
        assert_eq!(connected_components(&path(&[1.0, 1.0])), vec![0, 0, 0]);
        let g = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let labels = connected_components(&g);
        assert_eq!(labels, vec![0, 0, 2, 2]);
        assert_eq!(component_members(&labels), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn induced_subgraph() {
        let g = path(&[1.0, 2.0, 3.0]);
        let sub = g.induced(&[1, 2, 3]);
        assert_eq!(sub.node_count(), 3);
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![(0, 1, 2.0), (1, 2, 3.0)]);
    }

    #[test]
    fn weights_summary() {
        let g = path(&[1.0, 2.0, 6.0]);
        assert_eq!(g.min_weight(), Some(1.0));
        assert_eq!(g.max_weight(), Some(6.0));
        assert_eq!(g.mean_weight(), Some(3.0));
        assert_eq!(Graph::from_edges(1, []).unwrap().mean_weight(), None);
    }

    #[test]
    fn log2() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(1024), 10);
        assert_eq!(ceil_log2(1025), 11);
    }
}
