//! SNG-DBSCAN and the exact DBSCAN it degenerates to at full sampling rate.
//!
//! Both share the same graph post-processing:
//!
//! 1. vertices with degree `>= min_pts` are core points (a point is not its
//!    own neighbor);
//! 2. connected components of the core-induced subgraph are the clusters;
//! 3. a non-core vertex adjacent to a core vertex joins that core vertex's
//!    cluster, preferring the component with the smallest core index when
//!    several are adjacent;
//! 4. everything else is noise.
//!
//! Final cluster ids are ordered by each cluster's smallest member index.

use std::time::{Duration, Instant};

use crate::dataset::{Clustering, Dataset, Role};
use crate::error::{Error, Result};
use crate::graph::{self, connected_components, DistanceSpec, SampledGraph};

#[derive(Debug, Clone)]
pub struct SngParams {
    pub eps: f64,
    pub min_pts: usize,
    /// Sampling rate in `(0, 1]`.
    pub rate: f64,
    pub seed: u64,
    pub dist: DistanceSpec,
}

impl SngParams {
    pub fn new(eps: f64, min_pts: usize, rate: f64) -> Self {
        Self {
            eps,
            min_pts,
            rate,
            seed: 0,
            dist: DistanceSpec::Euclidean,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_dist(mut self, dist: DistanceSpec) -> Self {
        self.dist = dist;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::param("eps", format!("must be positive and finite, got {}", self.eps)));
        }
        if self.min_pts == 0 {
            return Err(Error::param("min_pts", "must be at least 1"));
        }
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(Error::param("rate", format!("must lie in (0, 1], got {}", self.rate)));
        }
        Ok(())
    }
}

/// Convenience mapping used when bridging a full-graph `MinPts` to a sampled
/// run: `max(2, floor(min_pts * rate))`.
pub fn scaled_min_pts(min_pts: usize, rate: f64) -> usize {
    ((min_pts as f64 * rate).floor() as usize).max(2)
}

/// Clustering plus construction statistics.
#[derive(Debug, Clone)]
pub struct ClusterRun {
    pub clustering: Clustering,
    pub edge_count: usize,
    pub distance_evals: u64,
    pub graph_bytes: usize,
    pub elapsed: Duration,
}

pub fn sng_dbscan(data: &Dataset, p: &SngParams) -> Result<Clustering> {
    Ok(sng_dbscan_run(data, p)?.clustering)
}

pub fn sng_dbscan_run(data: &Dataset, p: &SngParams) -> Result<ClusterRun> {
    p.validate()?;
    let start = Instant::now();
    let g = graph::build_sampled_graph(data, p.eps, p.rate, &p.dist, p.seed)?;
    let clustering = cluster_graph(&g, p.min_pts)?;
    Ok(ClusterRun {
        clustering,
        edge_count: g.edge_count(),
        distance_evals: g.distance_evals(),
        graph_bytes: g.memory_bytes(),
        elapsed: start.elapsed(),
    })
}

pub fn dbscan_exact(
    data: &Dataset,
    eps: f64,
    min_pts: usize,
    dist: &DistanceSpec,
) -> Result<Clustering> {
    Ok(dbscan_exact_run(data, eps, min_pts, dist)?.clustering)
}

pub fn dbscan_exact_run(
    data: &Dataset,
    eps: f64,
    min_pts: usize,
    dist: &DistanceSpec,
) -> Result<ClusterRun> {
    SngParams::new(eps, min_pts, 1.0).validate()?;
    let start = Instant::now();
    let g = graph::build_full_graph(data, eps, dist)?;
    let clustering = cluster_graph(&g, min_pts)?;
    Ok(ClusterRun {
        clustering,
        edge_count: g.edge_count(),
        distance_evals: g.distance_evals(),
        graph_bytes: g.memory_bytes(),
        elapsed: start.elapsed(),
    })
}

/// Core/border/noise extraction on an already built neighborhood graph.
pub fn cluster_graph(g: &SampledGraph, min_pts: usize) -> Result<Clustering> {
    if min_pts == 0 {
        return Err(Error::param("min_pts", "must be at least 1"));
    }
    let n = g.n();
    let core: Vec<bool> = (0..n).map(|v| g.degree(v) >= min_pts).collect();
    let comps = connected_components(g, &core);

    let mut raw: Vec<Option<u32>> = comps.labels.clone();
    let mut roles: Vec<Role> = core
        .iter()
        .map(|&c| if c { Role::Core } else { Role::Noise })
        .collect();
    for v in (0..n).filter(|&v| !core[v]) {
        let best = g
            .neighbors(v)
            .iter()
            .filter_map(|&u| comps.labels[u as usize])
            .min();
        if best.is_some() {
            raw[v] = best;
            roles[v] = Role::Border;
        }
    }

    // relabel by smallest member
    let mut remap = vec![u32::MAX; comps.count];
    let mut next = 0u32;
    let assignment = raw
        .into_iter()
        .map(|a| {
            a.map(|c| {
                let slot = &mut remap[c as usize];
                if *slot == u32::MAX {
                    *slot = next;
                    next += 1;
                }
                *slot
            })
        })
        .collect();
    Clustering::new(assignment, roles)
}
