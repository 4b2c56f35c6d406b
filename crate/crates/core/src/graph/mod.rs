//! Exact and subsampled ε-neighborhood graphs.
//!
//! Graphs are stored CSR-style: one offsets array of length `n + 1` and a
//! flat neighbor array in which every vertex's neighbors are sorted and
//! distinct. Construction evaluates candidate pairs per vertex (in parallel),
//! then merges them into the symmetric adjacency by a sort, which makes the
//! result independent of the worker count.

mod distance;
mod min_cut;
mod union_find;

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

pub use distance::{DistanceFn, DistanceSpec};
pub use min_cut::{min_cut, MAX_MIN_CUT_VERTICES};
pub use union_find::UnionFind;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::substream;

/// Undirected simple graph over vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledGraph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    distance_evals: u64,
}

impl SampledGraph {
    /// Build from an arbitrary list of undirected edges. Self-loops are
    /// dropped and duplicates merged.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Contract(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u != v {
                list.push((u.min(v) as u32, u.max(v) as u32));
            }
        }
        Ok(Self::from_sorted_pairs(n, list, 0))
    }

    fn from_sorted_pairs(n: usize, mut pairs: Vec<(u32, u32)>, distance_evals: u64) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        let mut degree = vec![0usize; n];
        for &(u, v) in &pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; offsets[n]];
        // Lexicographic pair order makes every row come out sorted: for a
        // vertex b, entries (a, b) with a < b precede entries (b, c).
        for &(u, v) in &pairs {
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        Self {
            offsets,
            neighbors,
            distance_evals,
        }
    }

    /// Vertex count.
    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Undirected edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Number of distance evaluations spent building this graph.
    pub fn distance_evals(&self) -> u64 {
        self.distance_evals
    }

    /// Bytes held by the adjacency arrays.
    pub fn memory_bytes(&self) -> usize {
        self.offsets.len() * std::mem::size_of::<usize>()
            + self.neighbors.len() * std::mem::size_of::<u32>()
    }

    /// Subgraph induced by `vertices` (relabelled to `0..vertices.len()` in
    /// the given order).
    pub fn induced(&self, vertices: &[usize]) -> Result<Self> {
        let mut remap = vec![u32::MAX; self.n()];
        for (new, &old) in vertices.iter().enumerate() {
            if old >= self.n() {
                return Err(Error::Contract(format!("vertex {old} out of range")));
            }
            remap[old] = new as u32;
        }
        let mut pairs = Vec::new();
        for (new_u, &old_u) in vertices.iter().enumerate() {
            for &old_v in self.neighbors(old_u) {
                let new_v = remap[old_v as usize];
                if new_v != u32::MAX && (new_u as u32) < new_v {
                    pairs.push((new_u as u32, new_v));
                }
            }
        }
        Ok(Self::from_sorted_pairs(vertices.len(), pairs, 0))
    }

    /// Text edge list: `"u v"` per line, `u < v`, sorted.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.edge_count() * 12);
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let active = vec![true; self.n()];
        connected_components(self, &active).count <= 1
    }
}

fn check_params(eps: f64, rate: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param("eps", format!("must be positive and finite, got {eps}")));
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::param("rate", format!("must lie in (0, 1], got {rate}")));
    }
    Ok(())
}

/// Candidate partners each vertex draws: `ceil(rate * n)` capped at `n - 1`.
///
/// A relative slack of 1e-12 absorbs representation error so that, e.g.,
/// `rate = 0.3, n = 10` gives 3 rather than 4.
pub fn partners_per_vertex(n: usize, rate: f64) -> usize {
    if n < 2 {
        return 0;
    }
    let raw = rate * n as f64;
    let k = (raw - raw.abs() * 1e-12).ceil().max(1.0) as usize;
    k.min(n - 1)
}

/// Probability that a fixed unordered pair is examined by at least one of
/// its endpoints, given per-vertex draws without replacement.
pub fn pair_inclusion_probability(n: usize, rate: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let q = partners_per_vertex(n, rate) as f64 / (n - 1) as f64;
    1.0 - (1.0 - q) * (1.0 - q)
}

/// Sampled ε-neighborhood graph.
///
/// Vertex `x` draws `partners_per_vertex(n, rate)` distinct partners from the
/// other `n - 1` indices using substream `x` of `seed`, and the edge
/// `{x, y}` is kept when `d(x, y) <= eps`. An edge is present if either
/// endpoint drew the other. With `rate = 1` every pair is examined and the
/// result equals [`build_full_graph`].
pub fn build_sampled_graph(
    data: &Dataset,
    eps: f64,
    rate: f64,
    dist: &DistanceSpec,
    seed: u64,
) -> Result<SampledGraph> {
    check_params(eps, rate)?;
    dist.validate(data)?;
    let n = data.n();
    let k = partners_per_vertex(n, rate);

    let words = n.div_ceil(64);
    let accepted: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0u64; words], Vec::with_capacity(k)),
            |(mask, picks), x| {
                let row = data.row(x);
                let keep = |y: usize| dist.eval(row, data.row(y)) <= eps;
                if k == n - 1 {
                    return (0..n).filter(|&y| y != x && keep(y)).map(|y| y as u32).collect();
                }
                let mut rng = substream(seed, x as u64);
                draw_distinct(&mut rng, n - 1, k, mask, picks);
                // ascending order keeps the row lookups cache-friendly
                picks.sort_unstable();
                picks
                    .iter()
                    .map(|&j| if j >= x { j + 1 } else { j })
                    .filter(|&y| keep(y))
                    .map(|y| y as u32)
                    .collect()
            },
        )
        .collect();

    let pairs: Vec<(u32, u32)> = accepted
        .iter()
        .enumerate()
        .flat_map(|(x, ys)| {
            let x = x as u32;
            ys.iter().map(move |&y| (x.min(y), x.max(y)))
        })
        .collect();
    Ok(SampledGraph::from_sorted_pairs(
        n,
        pairs,
        n as u64 * k as u64,
    ))
}

/// Floyd's algorithm: a uniformly random `k`-subset of `0..len` in `O(k)`.
///
/// `mask` is a zeroed bitmap of at least `len` bits used for membership and
/// is left zeroed on return.
fn draw_distinct<R: Rng + ?Sized>(rng: &mut R, len: usize, k: usize, mask: &mut [u64], out: &mut Vec<usize>) {
    out.clear();
    for j in len - k..len {
        let t = rng.random_range(0..=j);
        let pick = if mask[t / 64] >> (t % 64) & 1 == 1 { j } else { t };
        mask[pick / 64] |= 1 << (pick % 64);
        out.push(pick);
    }
    for &p in out.iter() {
        mask[p / 64] &= !(1 << (p % 64));
    }
}

/// Exact ε-neighborhood graph over all `n (n - 1) / 2` pairs.
pub fn build_full_graph(data: &Dataset, eps: f64, dist: &DistanceSpec) -> Result<SampledGraph> {
    check_params(eps, 1.0)?;
    dist.validate(data)?;
    let n = data.n();
    let pairs: Vec<(u32, u32)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|u| {
            let row = data.row(u);
            (u + 1..n)
                .filter(move |&v| dist.eval(row, data.row(v)) <= eps)
                .map(move |v| (u as u32, v as u32))
        })
        .collect();
    let evals = (n as u64) * (n as u64).saturating_sub(1) / 2;
    Ok(SampledGraph::from_sorted_pairs(n, pairs, evals))
}

/// Component labels for a subset of active vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Component id per vertex; `None` for inactive vertices.
    pub labels: Vec<Option<u32>>,
    pub count: usize,
}

impl Components {
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &c in self.labels.iter().flatten() {
            sizes[c as usize] += 1;
        }
        sizes
    }
}

/// Connected components of the subgraph induced by `active`.
///
/// Ids are assigned in order of each component's smallest vertex index.
pub fn connected_components(g: &SampledGraph, active: &[bool]) -> Components {
    assert_eq!(active.len(), g.n(), "active mask must cover every vertex");
    let mut uf = UnionFind::new(g.n());
    for u in (0..g.n()).filter(|&u| active[u]) {
        for &v in g.neighbors(u) {
            let v = v as usize;
            if v > u && active[v] {
                uf.union(u, v);
            }
        }
    }
    let mut root_id = vec![u32::MAX; g.n()];
    let mut labels = vec![None; g.n()];
    let mut count = 0u32;
    for u in (0..g.n()).filter(|&u| active[u]) {
        let r = uf.find(u);
        if root_id[r] == u32::MAX {
            root_id[r] = count;
            count += 1;
        }
        labels[u] = Some(root_id[r]);
    }
    Components {
        labels,
        count: count as usize,
    }
}
