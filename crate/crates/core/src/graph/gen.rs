//! Synthetic benchmark families: square meshes, R-MAT power-law graphs and
//! the product of a path with a base graph.
//!
//! All generators produce unit placeholder weights unless stated otherwise;
//! use [`assign_weights`](super::assign_weights) to draw real ones.

use super::{Graph, NodeId};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Quadrant probabilities `(a, b, c, d)` for the recursive descent.
pub const RMAT_PROBABILITIES: [f64; 4] = [0.57, 0.19, 0.19, 0.05];

/// `side × side` grid with 4-neighborhood: `side²` nodes, `2·side·(side−1)` edges.
pub fn mesh(side: usize) -> Result<Graph> {
    if side == 0 {
        return Err(Error::validation("mesh side must be at least 1"));
    }
    let id = |r: usize, c: usize| r * side + c;
    let mut edges = Vec::with_capacity(2 * side * (side - 1));
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                edges.push((id(r, c), id(r, c + 1), 1.0));
            }
            if r + 1 < side {
                edges.push((id(r, c), id(r + 1, c), 1.0));
            }
        }
    }
    Ok(Graph::from_edges(side * side, edges)?.with_label(format!("mesh({side})")))
}

/// R-MAT graph on `2^scale` nodes: samples `16·2^scale` directed edges by
/// recursive quadrant descent, then symmetrizes and deduplicates (self-loops
/// are dropped).
pub fn rmat(scale: u32, rng: &Rng) -> Result<Graph> {
    if scale == 0 || scale > 31 {
        return Err(Error::validation("R-MAT scale must be in 1..=31"));
    }
    let n = 1usize << scale;
    let samples = 16 * n;
    let [a, b, c, _] = RMAT_PROBABILITIES;
    let rng = rng.substream("rmat");
    let edges = (0..samples as u64).map(|i| {
        let (mut u, mut v) = (0usize, 0usize);
        for level in 0..scale {
            let x = rng.unit(i, level as u64);
            let (row, col) = if x < a {
                (0, 0)
            } else if x < a + b {
                (0, 1)
            } else if x < a + b + c {
                (1, 0)
            } else {
                (1, 1)
            };
            u = (u << 1) | row;
            v = (v << 1) | col;
        }
        (u, v, 1.0)
    });
    Ok(Graph::from_edges(n, edges)?.with_label(format!("rmat({scale})")))
}

/// Cartesian product of a unit-weight path of `copies` nodes with `base`:
/// node `(k, v)` has id `k·n_base + v`.
pub fn roads_product(base: &Graph, copies: usize) -> Result<Graph> {
    if copies == 0 {
        return Err(Error::validation("product needs at least one copy"));
    }
    let nb = base.node_count();
    let mut edges: Vec<(NodeId, NodeId, f64)> =
        Vec::with_capacity(copies * base.edge_count() + (copies - 1) * nb);
    for k in 0..copies {
        let shift = k * nb;
        edges.extend(base.edges().map(|(u, v, w)| (u + shift, v + shift, w)));
        if k + 1 < copies {
            edges.extend((0..nb).map(|v| (v + shift, v + shift + nb, 1.0)));
        }
    }
    let label = format!("roads({copies}; {})", base.label().unwrap_or("base"));
    Ok(Graph::from_edges(copies * nb, edges)?.with_label(label))
}
