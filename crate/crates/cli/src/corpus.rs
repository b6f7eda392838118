//! Graphs the verification suites run on.

use cldiam::{graph, Graph, Rng, WeightModel};

use crate::args::Level;

/// Random tree plus `extra` chords. With `pieces > 1` node `i` only links
/// to nodes in its residue class modulo `pieces`, giving that many
/// components.
pub fn random_graph(n: usize, extra: usize, pieces: usize, model: WeightModel, seed: u64) -> Graph {
    let rng = Rng::new(seed).substream("corpus");
    let mut edges = Vec::with_capacity(n + extra);
    for i in pieces..n {
        let slot = rng.below(i as u64, 0, (i / pieces) as u64) as usize;
        edges.push((slot * pieces + i % pieces, i, 1.0));
    }
    for k in 0..extra as u64 {
        let u = rng.below(k, 1, n as u64) as usize;
        let v = rng.below(k, 2, n as u64) as usize;
        if u % pieces == v % pieces {
            edges.push((u, v, 1.0));
        }
    }
    let g = Graph::from_edges(n, edges).expect("ids are in range");
    graph::assign_weights(&g, model, &Rng::new(seed)).expect("weight models are valid")
}

fn uniform(g: Graph, seed: u64) -> Graph {
    graph::assign_weights(&g, WeightModel::Uniform, &Rng::new(seed)).expect("uniform is valid")
}

fn path(weights: &[f64]) -> Graph {
    Graph::from_edges(weights.len() + 1, weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w)))
        .expect("path edges are valid")
}

/// Two disjoint graphs side by side.
pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
    let shift = a.node_count();
    let edges = a.edges().chain(b.edges().map(|(u, v, w)| (u + shift, v + shift, w)));
    Graph::from_edges(shift + b.node_count(), edges).expect("shifted ids are in range")
}

/// Paths, stars, meshes, R-MAT and disconnected graphs. The full level
/// goes up to mesh(64) and R-MAT(10).
pub fn small_corpus(level: Level) -> Vec<(String, Graph)> {
    let mut corpus = vec![
        ("path".to_string(), path(&[0.5, 2.0, 1.0, 3.0, 0.25, 1.5, 1.0, 2.5])),
        ("unit-path".to_string(), path(&[1.0; 64])),
        (
            "star".to_string(),
            Graph::from_edges(7, [(0, 1, 1.0), (0, 2, 5.0), (0, 3, 2.0), (0, 4, 0.5), (0, 5, 3.0), (0, 6, 1.0)])
                .expect("star edges are valid"),
        ),
        ("mesh8".to_string(), uniform(graph::mesh(8).expect("side > 0"), 8)),
        ("mesh16".to_string(), uniform(graph::mesh(16).expect("side > 0"), 16)),
        (
            "two-components".to_string(),
            disjoint_union(&uniform(graph::mesh(12).expect("side > 0"), 12), &path(&[3.0; 20])),
        ),
        ("tree".to_string(), random_graph(400, 0, 1, WeightModel::Uniform, 400)),
    ];
    match level {
        Level::Fast => {
            corpus.push(("rmat8".to_string(), uniform(graph::rmat(8, &Rng::new(8)).expect("scale ok"), 8)));
        }
        Level::Full => {
            corpus.push(("mesh32".to_string(), uniform(graph::mesh(32).expect("side > 0"), 32)));
            corpus.push(("mesh64".to_string(), uniform(graph::mesh(64).expect("side > 0"), 64)));
            corpus.push(("rmat10".to_string(), uniform(graph::rmat(10, &Rng::new(10)).expect("scale ok"), 10)));
            corpus.push(("forest".to_string(), random_graph(900, 300, 3, WeightModel::Uniform, 900)));
        }
    }
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;
    use cldiam::graph::{component_members, connected_components};

    #[test]
    fn pieces_give_components() {
        let g = random_graph(90, 40, 3, WeightModel::Uniform, 1);
        assert_eq!(component_members(&connected_components(&g)).len(), 3);
        let g = random_graph(90, 40, 1, WeightModel::Uniform, 1);
        assert_eq!(component_members(&connected_components(&g)).len(), 1);
    }

    #[test]
    fn union_keeps_both_halves() {
        let a = path(&[1.0, 2.0]);
        let u = disjoint_union(&a, &a);
        assert_eq!(u.node_count(), 6);
        assert_eq!(u.edge_weight(4, 5), Some(2.0));
        assert_eq!(connected_components(&u), vec![0, 0, 0, 3, 3, 3]);
    }
}
