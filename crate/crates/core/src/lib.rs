//! Diameter approximation for large undirected weighted graphs.
//!
//! The estimator grows low-radius clusters in parallel with Δ-bounded
//! relaxation steps, contracts them, and measures the diameter of the much
//! smaller quotient graph. A Δ-stepping SSSP baseline and brute-force
//! oracles sit alongside it for comparison and verification. Every parallel
//! phase reports rounds (bulk-synchronous supersteps) and work (node updates
//! plus messages) so runs can be compared independently of hardware.
//!
//! ```
//! use cldiam::{approximate_diameter, graph, DiameterOptions, Rng, WeightModel};
//!
//! let g = graph::assign_weights(&graph::mesh(16)?, WeightModel::Uniform, &Rng::new(1))?;
//! let est = approximate_diameter(&g, 4, &Rng::new(7), &DiameterOptions::default())?;
//! assert!(est.phi_approx >= cldiam::oracle::exact_diameter(&g)?);
//! # Ok::<(), cldiam::Error>(())
//! ```

pub mod baseline;
pub mod clustering;
pub mod diameter;
pub mod engine;
mod error;
pub mod graph;
pub mod oracle;
mod rng;

pub use clustering::{cluster, cluster2, ClusterOptions, ClusteringResult, DeltaInit};
pub use diameter::{approximate_diameter, Algorithm, DiameterEstimate, DiameterOptions};
pub use engine::RunMetrics;
pub use error::{Error, Result};
pub use graph::{Graph, NodeId, WeightModel};
pub use rng::Rng;
