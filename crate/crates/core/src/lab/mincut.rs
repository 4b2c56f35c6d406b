use crate::error::{Error, Result};
use crate::graph::{build_full_graph, min_cut, DistanceSpec};
use crate::lab::report::ExperimentReport;
use crate::rng::derive_seed;
use crate::synthetic::{generate_theory_scenario, unit_ball_volume, TheoryScenario};

/// Measurement of one `(n, seed)` draw: the exact ε-graph restricted to the
/// points of cluster 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MinCutCell {
    pub n: usize,
    pub seed: u64,
    pub cluster_size: usize,
    pub connected: bool,
    /// `None` when the cluster subgraph has fewer than two vertices.
    pub min_cut: Option<u64>,
    pub min_degree: usize,
}

impl MinCutCell {
    pub fn ratio(&self) -> Option<f64> {
        match (self.connected, self.min_cut) {
            (true, Some(c)) => Some(c as f64 / self.n as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinCutResult {
    pub eps: f64,
    /// `lambda_c rho v_D eps^D / 4`, the lower bound on `min_cut / n`.
    pub bound: f64,
    pub cells: Vec<MinCutCell>,
}

impl MinCutResult {
    pub fn cells_for(&self, n: usize) -> impl Iterator<Item = &MinCutCell> + '_ {
        self.cells.iter().filter(move |c| c.n == n)
    }

    /// Mean `min_cut / n` over the connected draws at `n`.
    pub fn mean_ratio(&self, n: usize) -> Option<f64> {
        let r: Vec<f64> = self.cells_for(n).filter_map(MinCutCell::ratio).collect();
        (!r.is_empty()).then(|| r.iter().sum::<f64>() / r.len() as f64)
    }

    pub fn report(&self, base_seed: u64) -> ExperimentReport {
        let mut rep = ExperimentReport::new("mincut", base_seed);
        let mut ns: Vec<usize> = self.cells.iter().map(|c| c.n).collect();
        ns.dedup();
        for n in ns {
            let cfg = format!("n={n},eps={}", self.eps);
            let cells: Vec<&MinCutCell> = self.cells_for(n).collect();
            let ratios: Vec<f64> = cells.iter().filter_map(|c| c.ratio()).collect();
            let degs: Vec<f64> = cells.iter().map(|c| c.min_degree as f64 / n as f64).collect();
            let disconnected = cells.iter().filter(|c| !c.connected).count();
            let sanity = cells
                .iter()
                .filter(|c| c.connected && c.min_cut.is_some_and(|m| m > c.min_degree as u64))
                .count();
            rep.push_mean(&cfg, "min_cut_over_n", &ratios);
            rep.push_mean(&cfg, "min_degree_over_n", &degs);
            rep.push(&cfg, "cut_bound_over_n", self.bound);
            rep.push(&cfg, "disconnected_trials", disconnected as f64);
            rep.push(&cfg, "cut_above_min_degree", sanity as f64);
        }
        rep
    }
}

/// For each `n` and seed, draw the scenario, keep the points of cluster 0,
/// and measure the global min cut of their exact ε-graph. Disconnected
/// draws are recorded, not treated as failures.
pub fn mincut_scaling_experiment(
    ts: &TheoryScenario,
    eps: f64,
    n_grid: &[usize],
    seeds: usize,
    base_seed: u64,
) -> Result<MinCutResult> {
    ts.validate()?;
    if seeds == 0 {
        return Err(Error::Config("need at least one seed".into()));
    }
    let (lambda_c, _) = ts.normalized_levels();
    let bound = 0.25 * lambda_c * ts.rho * unit_ball_volume(ts.dim) * eps.powi(ts.dim as i32);
    let mut cells = Vec::new();
    for &n in n_grid {
        for s in 0..seeds {
            let seed = derive_seed(base_seed, (n as u64) << 16 | s as u64);
            let data = generate_theory_scenario(ts, n, seed)?;
            let members: Vec<usize> = data
                .truth()
                .expect("scenario data carries labels")
                .iter()
                .enumerate()
                .filter_map(|(i, &l)| (l == 0).then_some(i))
                .collect();
            cells.push(measure_cluster(&data, &members, eps, n, seed)?);
        }
    }
    Ok(MinCutResult { eps, bound, cells })
}

fn measure_cluster(
    data: &crate::dataset::Dataset,
    members: &[usize],
    eps: f64,
    n: usize,
    seed: u64,
) -> Result<MinCutCell> {
    if members.len() < 2 {
        return Ok(MinCutCell {
            n,
            seed,
            cluster_size: members.len(),
            connected: false,
            min_cut: None,
            min_degree: 0,
        });
    }
    let sub = data.select(members)?;
    let g = build_full_graph(&sub, eps, &DistanceSpec::Euclidean)?;
    let connected = g.is_connected();
    let min_degree = g.degrees().into_iter().min().unwrap_or(0);
    let cut = if connected { min_cut(&g)? } else { 0 };
    Ok(MinCutCell {
        n,
        seed,
        cluster_size: members.len(),
        connected,
        min_cut: Some(cut),
        min_degree,
    })
}
