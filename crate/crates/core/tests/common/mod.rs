#![allow(dead_code)]

use cldiam::{graph, Graph, Rng, WeightModel};

/// Random tree on `n` nodes plus `extra` random chords, reweighted by
/// `model`. Disconnected when `pieces > 1`: node `i` links only inside its
/// residue class modulo `pieces`.
pub fn random_graph(n: usize, extra: usize, pieces: usize, model: WeightModel, seed: u64) -> Graph {
    let rng = Rng::new(seed).substream("test-graph");
    let mut edges = Vec::new();
    for i in pieces..n {
        let parent_slot = rng.below(i as u64, 0, (i / pieces) as u64) as usize;
        edges.push((parent_slot * pieces + i % pieces, i, 1.0));
    }
    for k in 0..extra {
        let u = rng.below(k as u64, 1, n as u64) as usize;
        let v = rng.below(k as u64, 2, n as u64) as usize;
        if u % pieces == v % pieces {
            edges.push((u, v, 1.0));
        }
    }
    let g = Graph::from_edges(n, edges).unwrap();
    graph::assign_weights(&g, model, &Rng::new(seed)).unwrap()
}

pub fn path(weights: &[f64]) -> Graph {
    Graph::from_edges(
        weights.len() + 1,
        weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w)),
    )
    .unwrap()
}

pub fn star(weights: &[f64]) -> Graph {
    Graph::from_edges(
        weights.len() + 1,
        weights.iter().enumerate().map(|(i, &w)| (0, i + 1, w)),
    )
    .unwrap()
}

pub const MODELS: [WeightModel; 3] = [
    WeightModel::Uniform,
    WeightModel::TwoPoint { p_big: 0.1, small: 1e-3, big: 1.0 },
    WeightModel::AsGiven,
];

/// Small graphs of every shape the estimators are checked on.
pub fn small_corpus() -> Vec<(String, Graph)> {
    let uniform = |g: Graph, seed| graph::assign_weights(&g, WeightModel::Uniform, &Rng::new(seed)).unwrap();
    vec![
        ("path".into(), path(&[0.5, 2.0, 1.0, 3.0, 0.25, 1.5, 1.0])),
        ("unit-path".into(), path(&[1.0; 40])),
        ("star".into(), star(&[1.0, 5.0, 2.0, 0.5, 3.0])),
        ("mesh8".into(), uniform(graph::mesh(8).unwrap(), 3)),
        ("mesh16".into(), uniform(graph::mesh(16).unwrap(), 4)),
        ("rmat7".into(), uniform(graph::rmat(7, &Rng::new(5)).unwrap(), 5)),
        ("two-components".into(), random_graph(150, 60, 2, WeightModel::Uniform, 6)),
        ("tree".into(), random_graph(300, 0, 1, WeightModel::Uniform, 7)),
    ]
}
