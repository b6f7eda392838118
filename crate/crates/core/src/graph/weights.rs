use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// How edge weights are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightModel {
    /// Keep the weights already on the graph.
    AsGiven,
    /// Uniform in `(0, 1]`.
    Uniform,
    /// `big` with probability `p_big`, otherwise `small`.
    TwoPoint { p_big: f64, small: f64, big: f64 },
}

impl WeightModel {
    pub fn validate(&self) -> Result<()> {
        if let WeightModel::TwoPoint { p_big, small, big } = *self {
            if !(0.0..=1.0).contains(&p_big) {
                return Err(Error::validation("two-point probability must lie in [0, 1]"));
            }
            for w in [small, big] {
                super::check_weight(w)?;
            }
        }
        Ok(())
    }
}

/// Redraws every edge weight. The draw for edge `{u, v}` is keyed by
/// `(min(u, v), max(u, v))`, so it does not depend on iteration order and
/// both adjacency entries agree.
pub fn assign_weights(g: &Graph, model: WeightModel, rng: &Rng) -> Result<Graph> {
    model.validate()?;
    let rng = rng.substream("weights");
    match model {
        WeightModel::AsGiven => Ok(g.clone()),
        WeightModel::Uniform => g.map_weights(|u, v, _| rng.unit_open_closed(u as u64, v as u64)),
        WeightModel::TwoPoint { p_big, small, big } => g.map_weights(|u, v, _| {
            if rng.unit(u as u64, v as u64) < p_big {
                big
            } else {
                small
            }
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::mesh;

    #[test]
    fn uniform_range_and_determinism() {
        let g = mesh(16).unwrap();
        let a = assign_weights(&g, WeightModel::Uniform, &Rng::new(3)).unwrap();
        let b = assign_weights(&g, WeightModel::Uniform, &Rng::new(3)).unwrap();
        assert_eq!(a.weights(), b.weights());
        assert!(a.weights().iter().all(|&w| w > 0.0 && w <= 1.0));
        for (u, v, w) in a.edges() {
            assert_eq!(a.edge_weight(v, u), Some(w));
        }
    }

    #[test]
    fn two_point_values() {
        let g = mesh(32).unwrap();
        let model = WeightModel::TwoPoint { p_big: 0.1, small: 1e-6, big: 1.0 };
        let h = assign_weights(&g, model, &Rng::new(5)).unwrap();
        let big = h.edges().filter(|e| e.2 == 1.0).count();
        assert!(h.weights().iter().all(|&w| w == 1.0 || w == 1e-6));
        let frac = big as f64 / h.edge_count() as f64;
        assert!((frac - 0.1).abs() < 0.03, "{frac}");
    }

    #[test]
    fn as_given_is_identity() {
        let g = Graph::from_edges(2, [(0, 1, 4.0)]).unwrap();
        assert_eq!(assign_weights(&g, WeightModel::AsGiven, &Rng::new(0)).unwrap(), g);
    }

    #[test]
    fn rejects_bad_two_point() {
        let g = mesh(2).unwrap();
        let bad = WeightModel::TwoPoint { p_big: 1.5, small: 1.0, big: 2.0 };
        assert!(assign_weights(&g, bad, &Rng::new(0)).is_err());
    }
}
