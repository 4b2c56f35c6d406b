use crate::cluster::{sng_dbscan, SngParams};
use crate::error::{Error, Result};
use crate::graph::{pair_inclusion_probability, DistanceSpec};
use crate::lab::report::ExperimentReport;
use crate::metrics::hausdorff;
use crate::rng::derive_seed;
use crate::synthetic::{generate_levelset_scenario, unit_ball_volume, LevelSetScenario};

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetConfig {
    pub eps: f64,
    /// Per-vertex sampling rate, held fixed across the grid.
    pub rate: f64,
    pub n_grid: Vec<usize>,
    pub seeds: usize,
    pub base_seed: u64,
    /// Size of the analytic sample standing in for the true level set.
    pub truth_samples: usize,
    /// Skip calibration and use this `min_pts` everywhere.
    pub min_pts: Option<usize>,
}

impl Default for LevelSetConfig {
    fn default() -> Self {
        Self {
            eps: 0.1,
            rate: 0.2,
            n_grid: vec![2_000, 4_000, 8_000, 16_000],
            seeds: 5,
            base_seed: 0,
            truth_samples: 10_000,
            min_pts: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetCell {
    pub n: usize,
    pub trial: usize,
    pub min_pts: usize,
    /// Infinite when no point was clustered.
    pub hausdorff: f64,
    pub clustered: usize,
    pub clusters: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetResult {
    pub config: LevelSetConfig,
    pub delta: f64,
    pub beta: f64,
    pub cells: Vec<LevelSetCell>,
}

impl LevelSetResult {
    fn column(&self, n: usize) -> Vec<f64> {
        self.cells.iter().filter(|c| c.n == n).map(|c| c.hausdorff).collect()
    }

    pub fn mean_hausdorff(&self, n: usize) -> f64 {
        let v = self.column(n);
        v.iter().sum::<f64>() / v.len() as f64
    }

    /// `((ln 4n + ln 1/delta) / (s n))^(1/(2 beta)) + eps` with unit constant.
    pub fn rate_curve(&self, n: usize) -> f64 {
        rate_curve(n, self.config.rate, self.delta, self.beta, self.config.eps)
    }

    pub fn report(&self) -> ExperimentReport {
        let mut rep = ExperimentReport::new("levelset", self.config.base_seed);
        for &n in &self.config.n_grid {
            let cfg = format!("n={n},s={},eps={}", self.config.rate, self.config.eps);
            let cells: Vec<&LevelSetCell> = self.cells.iter().filter(|c| c.n == n).collect();
            rep.push(&cfg, "min_pts", cells[0].min_pts as f64);
            rep.push_mean(&cfg, "hausdorff", &self.column(n));
            rep.push(&cfg, "rate_curve", self.rate_curve(n));
            rep.push_mean(&cfg, "clusters", &cells.iter().map(|c| c.clusters as f64).collect::<Vec<_>>());
            rep.push(&cfg, "truth_samples", self.config.truth_samples as f64);
        }
        rep
    }
}

fn rate_curve(n: usize, s: f64, delta: f64, beta: f64, eps: f64) -> f64 {
    let nf = n as f64;
    (((4.0 * nf).ln() + (1.0 / delta).ln()) / (s * nf)).powf(0.5 / beta) + eps
}

/// `min_pts = v_D eps^D s n (level - C eps^beta - sqrt((ln 4n + ln 1/delta)/(s n)))`,
/// rounded. `s` here is the probability that a given pair is examined.
pub fn calibrate_levelset_min_pts(ls: &LevelSetScenario, eps: f64, s: f64, n: usize) -> Result<usize> {
    ls.validate()?;
    if !(eps > 0.0) {
        return Err(Error::param("eps", "must be positive"));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::param("rate", format!("must lie in (0, 1], got {s}")));
    }
    let (_, c_hi) = ls.regularity().ok_or_else(|| {
        Error::Config("regularity constants are only exact at the plateau level or for beta = 1".into())
    })?;
    let sn = s * n as f64;
    let bias = c_hi * eps.powf(ls.beta);
    let spread = (((4.0 * n as f64).ln() + (1.0 / ls.delta).ln()) / sn).sqrt();
    let slack = ls.level - bias - spread;
    if slack <= 0.0 {
        let culprit = if bias >= ls.level {
            format!("C eps^beta = {bias} already exceeds the level {}", ls.level)
        } else {
            format!("concentration term {spread} exceeds level - C eps^beta = {}", ls.level - bias)
        };
        return Err(Error::Config(format!("min_pts calibration is non-positive: {culprit}")));
    }
    let m = (unit_ball_volume(ls.dim) * eps.powi(ls.dim as i32) * sn * slack).round();
    if m < 1.0 {
        return Err(Error::Config(format!(
            "min_pts calibration rounds to zero: v_D eps^D s n = {} is too small",
            unit_ball_volume(ls.dim) * eps.powi(ls.dim as i32) * sn
        )));
    }
    Ok(m as usize)
}

/// Cluster draws from the bump mixture along `n_grid` and measure the
/// Hausdorff distance from the union of clustered points to the level set.
pub fn levelset_experiment(ls: &LevelSetScenario, cfg: &LevelSetConfig) -> Result<LevelSetResult> {
    ls.validate()?;
    if cfg.seeds == 0 || cfg.n_grid.is_empty() || cfg.truth_samples == 0 {
        return Err(Error::Config("level-set run needs a grid, seeds and truth samples".into()));
    }
    let truth = ls.level_set_sample(cfg.truth_samples, derive_seed(cfg.base_seed, u64::MAX))?;
    let truth_refs: Vec<&[f64]> = truth.iter().map(Vec::as_slice).collect();
    let mut cells = Vec::new();
    for &n in &cfg.n_grid {
        let min_pts = match cfg.min_pts {
            Some(m) => m,
            None => calibrate_levelset_min_pts(ls, cfg.eps, pair_inclusion_probability(n, cfg.rate), n)?,
        };
        for trial in 0..cfg.seeds {
            let data_seed = derive_seed(cfg.base_seed, (n as u64) << 20 | trial as u64);
            let data = generate_levelset_scenario(ls, n, data_seed)?;
            let params = SngParams::new(cfg.eps, min_pts, cfg.rate).with_seed(derive_seed(data_seed, 1));
            let c = sng_dbscan(&data, &params)?;
            let members: Vec<&[f64]> = c.clustered_indices().into_iter().map(|i| data.row(i)).collect();
            let d = if members.is_empty() {
                f64::INFINITY
            } else {
                hausdorff(&members, &truth_refs, &DistanceSpec::Euclidean)?
            };
            cells.push(LevelSetCell {
                n,
                trial,
                min_pts,
                hausdorff: d,
                clustered: members.len(),
                clusters: c.k(),
            });
        }
    }
    Ok(LevelSetResult { config: cfg.clone(), delta: ls.delta, beta: ls.beta, cells })
}
