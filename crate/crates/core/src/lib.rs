//! Density-based clustering on a uniformly subsampled ε-neighborhood graph.
//!
//! Each point draws `ceil(s n)` random partners and keeps those within `eps`;
//! the core points are the vertices of degree at least `min_pts` in that
//! sparse graph, clusters are the connected components among core points,
//! and non-core points attach to an adjacent core point's cluster when they
//! have one. At `s = 1` this is exactly DBSCAN. The run costs `n ceil(s n)`
//! distance evaluations and touches no spatial index, so any dissimilarity
//! function works.
//!
//! Modules:
//! - [`dataset`]: point sets, clusterings, CSV/binary/label files
//! - [`graph`]: exact and sampled neighborhood graphs, components, min cut
//! - [`cluster`]: the sampled clusterer and the exact oracle
//! - [`metrics`]: ARI, AMI, Hausdorff distance
//! - [`synthetic`]: scenario generators
//! - [`lab`]: experiment runners and their tabular reports

// `!(x > 0.0)` is used on purpose so that NaN is rejected along with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cluster;
pub mod config;
pub mod dataset;
pub mod error;
pub mod graph;
pub mod lab;
pub mod metrics;
pub mod rng;
pub mod synthetic;

pub use cluster::{dbscan_exact, sng_dbscan, ClusterRun, SngParams};
pub use dataset::{Clustering, Dataset, Role};
pub use error::{Error, Result};
pub use graph::{DistanceSpec, SampledGraph};
pub use metrics::NoisePolicy;

/// Size the global worker pool used by every parallel stage. Must be called
/// before any parallel work; results never depend on the count.
pub fn set_threads(n: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot size the thread pool: {e}")))
}
