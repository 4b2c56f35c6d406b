use crate::cluster::{dbscan_exact, sng_dbscan, SngParams};
use crate::error::{Error, Result};
use crate::graph::{pair_inclusion_probability, DistanceSpec};
use crate::lab::report::ExperimentReport;
use crate::lab::{compute_minpts_window, log_rate};
use crate::metrics::{scores, NoisePolicy};
use crate::rng::derive_seed;
use crate::synthetic::{generate_ball_mixture, BallMixtureSpec, TheoryScenario};

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryConfig {
    pub n_grid: Vec<usize>,
    /// `c` in the rate `min(1, c ln n / n)`.
    pub multiplier: f64,
    pub eps: f64,
    pub seeds: usize,
    pub base_seed: u64,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        Self {
            n_grid: vec![1_000, 3_000, 10_000, 30_000, 100_000],
            multiplier: 20.0,
            eps: 0.8,
            seeds: 10,
            base_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryCell {
    pub n: usize,
    pub trial: usize,
    pub rate: f64,
    pub min_pts: usize,
    pub ari: f64,
    pub ami: f64,
    pub clusters: usize,
    pub noise: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub config: RecoveryConfig,
    pub cells: Vec<RecoveryCell>,
}

impl RecoveryResult {
    fn column(&self, n: usize, f: impl Fn(&RecoveryCell) -> f64) -> Vec<f64> {
        self.cells.iter().filter(|c| c.n == n).map(f).collect()
    }

    pub fn mean_ari(&self, n: usize) -> f64 {
        mean(&self.column(n, |c| c.ari))
    }

    pub fn mean_ami(&self, n: usize) -> f64 {
        mean(&self.column(n, |c| c.ami))
    }

    pub fn mean_clusters(&self, n: usize) -> f64 {
        mean(&self.column(n, |c| c.clusters as f64))
    }

    pub fn report(&self) -> ExperimentReport {
        let mut rep = ExperimentReport::new("recovery", self.config.base_seed);
        for &n in &self.config.n_grid {
            let cfg = format!("n={n},c={},eps={}", self.config.multiplier, self.config.eps);
            rep.push(&cfg, "rate", log_rate(self.config.multiplier, n));
            rep.push_mean(&cfg, "min_pts", &self.column(n, |c| c.min_pts as f64));
            rep.push_mean(&cfg, "ari", &self.column(n, |c| c.ari));
            rep.push_mean(&cfg, "ami", &self.column(n, |c| c.ami));
            rep.push_mean(&cfg, "clusters", &self.column(n, |c| c.clusters as f64));
            rep.push_mean(&cfg, "noise_fraction", &self.column(n, |c| c.noise as f64 / n as f64));
        }
        rep
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// `min_pts` for a recovery run: the midpoint of the admissible window,
/// scaled by the probability that a pair is examined.
pub(crate) fn recovery_min_pts(ts: &TheoryScenario, eps: f64, rate: f64, n: usize) -> Result<usize> {
    let s_pair = pair_inclusion_probability(n, rate).max(f64::MIN_POSITIVE);
    Ok(compute_minpts_window(ts, eps, s_pair, n)?.midpoint_min_pts())
}

/// Draw ball mixtures along `n_grid`, cluster each at rate
/// `min(1, c ln n / n)` and score against the ball labels.
pub fn recovery_experiment(spec: &BallMixtureSpec, cfg: &RecoveryConfig) -> Result<RecoveryResult> {
    spec.validate()?;
    if cfg.seeds == 0 || cfg.n_grid.is_empty() {
        return Err(Error::Config("recovery needs a non-empty grid and at least one seed".into()));
    }
    let ts = TheoryScenario::from_ball_mixture(spec)?;
    let mut cells = Vec::new();
    for &n in &cfg.n_grid {
        let rate = log_rate(cfg.multiplier, n);
        let min_pts = recovery_min_pts(&ts, cfg.eps, rate, n)?;
        for trial in 0..cfg.seeds {
            let (data_seed, sample_seed) = trial_seeds(cfg.base_seed, n, trial);
            let data = generate_ball_mixture(&BallMixtureSpec { n, seed: data_seed, ..spec.clone() })?;
            let params = SngParams::new(cfg.eps, min_pts, rate).with_seed(sample_seed);
            let c = sng_dbscan(&data, &params)?;
            cells.push(score_cell(&data, &c, n, trial, rate, min_pts)?);
        }
    }
    Ok(RecoveryResult { config: cfg.clone(), cells })
}

/// The same draws as [`recovery_experiment`] clustered with exact DBSCAN.
pub fn recovery_experiment_exact(spec: &BallMixtureSpec, cfg: &RecoveryConfig) -> Result<RecoveryResult> {
    spec.validate()?;
    let ts = TheoryScenario::from_ball_mixture(spec)?;
    let mut cells = Vec::new();
    for &n in &cfg.n_grid {
        let min_pts = recovery_min_pts(&ts, cfg.eps, 1.0, n)?;
        for trial in 0..cfg.seeds {
            let (data_seed, _) = trial_seeds(cfg.base_seed, n, trial);
            let data = generate_ball_mixture(&BallMixtureSpec { n, seed: data_seed, ..spec.clone() })?;
            let c = dbscan_exact(&data, cfg.eps, min_pts, &DistanceSpec::Euclidean)?;
            cells.push(score_cell(&data, &c, n, trial, 1.0, min_pts)?);
        }
    }
    Ok(RecoveryResult { config: cfg.clone(), cells })
}

fn trial_seeds(base: u64, n: usize, trial: usize) -> (u64, u64) {
    let data_seed = derive_seed(base, (n as u64) << 20 | trial as u64);
    (data_seed, derive_seed(data_seed, 1))
}

fn score_cell(
    data: &crate::dataset::Dataset,
    c: &crate::dataset::Clustering,
    n: usize,
    trial: usize,
    rate: f64,
    min_pts: usize,
) -> Result<RecoveryCell> {
    let truth: Vec<i64> = data
        .truth()
        .expect("mixture data carries labels")
        .iter()
        .map(|&t| i64::from(t))
        .collect();
    let (ari, ami) = scores(&c.labels(), &truth, NoisePolicy::OwnCluster)?;
    Ok(RecoveryCell {
        n,
        trial,
        rate,
        min_pts,
        ari,
        ami,
        clusters: c.k(),
        noise: c.noise_count(),
    })
}
