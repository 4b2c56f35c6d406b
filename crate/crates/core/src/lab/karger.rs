use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{min_cut, SampledGraph, UnionFind};
use crate::lab::report::{mean_stderr, ExperimentReport};
use crate::rng::{derive_seed, substream};

#[derive(Debug, Clone, PartialEq)]
pub struct KargerRow {
    pub rate: f64,
    pub connected: usize,
    pub trials: usize,
}

impl KargerRow {
    pub fn frequency(&self) -> f64 {
        self.connected as f64 / self.trials as f64
    }

    /// Binomial standard error of the frequency.
    pub fn stderr(&self) -> f64 {
        let p = self.frequency();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KargerResult {
    pub n: usize,
    pub min_cut: u64,
    pub rows: Vec<KargerRow>,
}

impl KargerResult {
    /// `ln(n) / min_cut`; rates are quoted as multiples of this.
    pub fn threshold_shape(&self) -> f64 {
        (self.n as f64).ln() / self.min_cut as f64
    }

    pub fn report(&self, seed: u64) -> ExperimentReport {
        let mut rep = ExperimentReport::new("karger", seed);
        let cfg = format!("n={},min_cut={}", self.n, self.min_cut);
        rep.push(&cfg, "threshold_shape", self.threshold_shape());
        for row in &self.rows {
            let samples: Vec<f64> = (0..row.trials)
                .map(|t| f64::from(u8::from(t < row.connected)))
                .collect();
            let (mean, _) = mean_stderr(&samples);
            rep.rows.push(crate::lab::ReportRow {
                config: format!("{cfg},s={:.6}", row.rate),
                statistic: "connected_frequency".into(),
                value: mean,
                stderr: Some(row.stderr()),
                trials: row.trials,
            });
        }
        rep
    }
}

/// Keep each edge independently with probability `s` and record how often
/// the result stays connected.
pub fn karger_connectivity_trial(
    g: &SampledGraph,
    s_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<KargerResult> {
    if g.n() < 2 || !g.is_connected() {
        return Err(Error::Contract("edge-sampling trial needs a connected graph with n >= 2".into()));
    }
    if trials == 0 {
        return Err(Error::Config("need at least one trial".into()));
    }
    if let Some(s) = s_grid.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(Error::param("rate", format!("edge probability {s} outside [0, 1]")));
    }
    let cut = min_cut(g)?;
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let rows = s_grid
        .iter()
        .enumerate()
        .map(|(si, &s)| {
            let stream_seed = derive_seed(seed, si as u64);
            let connected = (0..trials)
                .into_par_iter()
                .filter(|&t| sampled_connected(g.n(), &edges, s, stream_seed, t as u64))
                .count();
            KargerRow { rate: s, connected, trials }
        })
        .collect();
    Ok(KargerResult { n: g.n(), min_cut: cut, rows })
}

fn sampled_connected(n: usize, edges: &[(usize, usize)], s: f64, seed: u64, trial: u64) -> bool {
    let mut rng = substream(seed, trial);
    let mut uf = UnionFind::new(n);
    let mut parts = n;
    for &(u, v) in edges {
        if rng.random::<f64>() < s && uf.union(u, v) {
            parts -= 1;
        }
    }
    parts == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> SampledGraph {
        SampledGraph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn extremes() {
        let res = karger_connectivity_trial(&complete(20), &[0.0, 1.0], 50, 1).unwrap();
        assert_eq!(res.min_cut, 19);
        assert_eq!(res.rows[0].frequency(), 0.0);
        assert_eq!(res.rows[1].frequency(), 1.0);
    }

    #[test]
    fn rejects_disconnected_input() {
        let g = SampledGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            karger_connectivity_trial(&g, &[0.5], 10, 0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn reproducible() {
        let g = complete(12);
        let a = karger_connectivity_trial(&g, &[0.2, 0.4], 64, 5).unwrap();
        let b = karger_connectivity_trial(&g, &[0.2, 0.4], 64, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.report(5).to_tsv(), b.report(5).to_tsv());
    }
}
