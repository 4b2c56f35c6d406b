//! Deterministic global minimum cut (Stoer–Wagner) on unit-weight graphs.

use super::SampledGraph;
use crate::error::{Error, Result};

/// Largest vertex count accepted by [`min_cut`]; the dense weight matrix
/// needs `4 n^2` bytes.
pub const MAX_MIN_CUT_VERTICES: usize = 8192;

/// Size of the smallest proper cut of `g`. Disconnected graphs give 0.
pub fn min_cut(g: &SampledGraph) -> Result<u64> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Contract(format!("min cut needs at least 2 vertices, got {n}")));
    }
    if n > MAX_MIN_CUT_VERTICES {
        return Err(Error::Contract(format!(
            "min cut limited to {MAX_MIN_CUT_VERTICES} vertices, got {n}"
        )));
    }

    let mut w = vec![0u32; n * n];
    for (u, v) in g.edges() {
        w[u * n + v] = 1;
        w[v * n + u] = 1;
    }

    // `alive` holds the representatives of merged super-vertices.
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    let mut conn = vec![0u64; n];
    let mut added = vec![false; n];

    while alive.len() > 1 {
        for &v in &alive {
            conn[v] = 0;
            added[v] = false;
        }
        let mut prev = alive[0];
        let mut last = alive[0];
        let mut cut_of_phase = 0;
        for step in 0..alive.len() {
            // most tightly connected vertex not yet in A; ties to lowest index
            let mut pick = usize::MAX;
            let mut pick_w = 0u64;
            for &v in &alive {
                if !added[v] && (pick == usize::MAX || conn[v] > pick_w) {
                    pick = v;
                    pick_w = conn[v];
                }
            }
            added[pick] = true;
            prev = last;
            last = pick;
            if step + 1 == alive.len() {
                cut_of_phase = pick_w;
            } else {
                let row = &w[pick * n..(pick + 1) * n];
                for &v in &alive {
                    if !added[v] {
                        conn[v] += u64::from(row[v]);
                    }
                }
            }
        }
        best = best.min(cut_of_phase);
        if best == 0 {
            return Ok(0);
        }

        // merge `last` into `prev`
        for &v in &alive {
            let add = w[last * n + v];
            w[prev * n + v] += add;
            w[v * n + prev] += add;
        }
        w[prev * n + prev] = 0;
        alive.retain(|&v| v != last);
    }
    Ok(best)
}
