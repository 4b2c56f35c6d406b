//! Synthetic scenarios: uniform ball mixtures, separated clusters with a
//! low-density noise region, and radial bump densities with a known level
//! set.
//!
//! Every generator draws point `i` from substream `i` of its seed, so the
//! output is fixed by the seed alone and can be produced in parallel.

use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::substream;

/// Volume of the unit ball in `dim` dimensions, `pi^(D/2) / Gamma(D/2 + 1)`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    // v_0 = 1, v_1 = 2, v_D = v_{D-2} * 2 pi / D
    let mut v = if dim.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut d = if dim.is_multiple_of(2) { 2 } else { 3 };
    while d <= dim {
        v *= 2.0 * PI / d as f64;
        d += 2;
    }
    v
}

pub fn ball_volume(dim: usize, radius: f64) -> f64 {
    unit_ball_volume(dim) * radius.powi(dim as i32)
}

/// Uniform point in the ball: isotropic direction times `radius * U^(1/D)`.
pub fn sample_in_ball<R: Rng + ?Sized>(rng: &mut R, center: &[f64], radius: f64) -> Vec<f64> {
    let r = radius * rng.random::<f64>().powf(1.0 / center.len() as f64);
    sample_on_sphere(rng, center, r)
}

pub fn sample_on_sphere<R: Rng + ?Sized>(rng: &mut R, center: &[f64], radius: f64) -> Vec<f64> {
    loop {
        let dir: Vec<f64> = (0..center.len()).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return center
                .iter()
                .zip(&dir)
                .map(|(c, d)| c + radius * d / norm)
                .collect();
        }
    }
}

/// Uniform point in the shell `inner <= |x - center| <= outer`.
fn sample_in_shell<R: Rng + ?Sized>(rng: &mut R, center: &[f64], inner: f64, outer: f64) -> Vec<f64> {
    let d = center.len() as i32;
    let (lo, hi) = (inner.powi(d), outer.powi(d));
    let r = (lo + rng.random::<f64>() * (hi - lo)).powf(1.0 / d as f64);
    sample_on_sphere(rng, center, r)
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Fraction of `B(x, r)` that lies inside a ball of radius `radius` when
/// `x` sits on its boundary. This is the smallest such fraction over the
/// ball, i.e. the thinness constant for scales up to `r`.
pub fn ball_thinness(dim: usize, radius: f64, r: f64) -> f64 {
    assert!(dim >= 1 && radius > 0.0 && r > 0.0);
    if r >= 2.0 * radius {
        return ball_volume(dim, radius) / ball_volume(dim, r);
    }
    if dim == 1 {
        return 0.5;
    }
    // Slice along the axis through x = (radius, 0, ..): the section at t has
    // squared radius min(radius^2 - t^2, r^2 - (t - radius)^2).
    let cross = unit_ball_volume(dim - 1);
    let section = |t: f64| {
        let s = (radius * radius - t * t).min(r * r - (t - radius) * (t - radius));
        if s <= 0.0 {
            0.0
        } else {
            cross * s.powf((dim as f64 - 1.0) / 2.0)
        }
    };
    let split = (2.0 * radius * radius - r * r) / (2.0 * radius);
    let vol = simpson(section, radius - r, split, 20_000) + simpson(section, split, radius, 20_000);
    vol / ball_volume(dim, r)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels + panels % 2;
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Mixture of uniform balls sharing one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct BallMixtureSpec {
    pub n: usize,
    pub dim: usize,
    pub centers: Vec<Vec<f64>>,
    pub radius: f64,
    pub weights: Vec<f64>,
    pub seed: u64,
}

impl BallMixtureSpec {
    /// Three unit balls in 3-D with centers at mutual distance 6, equal weights.
    pub fn three_balls(n: usize, seed: u64) -> Self {
        let h = 3.0 * 3f64.sqrt();
        Self {
            n,
            dim: 3,
            centers: vec![vec![0.0, 0.0, 0.0], vec![6.0, 0.0, 0.0], vec![3.0, h, 0.0]],
            radius: 1.0,
            weights: vec![1.0 / 3.0; 3],
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.dim == 0 {
            return Err(Error::Contract("ball mixture needs n >= 1 and dim >= 1".into()));
        }
        if self.centers.is_empty() || self.centers.len() != self.weights.len() {
            return Err(Error::Contract(format!(
                "{} centers but {} weights",
                self.centers.len(),
                self.weights.len()
            )));
        }
        if let Some(c) = self.centers.iter().find(|c| c.len() != self.dim) {
            return Err(Error::Contract(format!(
                "center of dimension {} in a {}-dimensional mixture",
                c.len(),
                self.dim
            )));
        }
        if !(self.radius > 0.0) {
            return Err(Error::param("radius", "must be positive"));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::param("weights", "must be non-negative"));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::param("weights", format!("must sum to 1, got {total}")));
        }
        Ok(())
    }

    /// Smallest gap between two ball surfaces.
    pub fn separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.centers.len() {
            for j in i + 1..self.centers.len() {
                best = best.min(distance(&self.centers[i], &self.centers[j]) - 2.0 * self.radius);
            }
        }
        best
    }
}

/// Draw the mixture; truth labels are ball indices.
pub fn generate_ball_mixture(spec: &BallMixtureSpec) -> Result<Dataset> {
    spec.validate()?;
    let pick = WeightedIndex::new(&spec.weights)
        .map_err(|e| Error::param("weights", e.to_string()))?;
    let rows: Vec<(Vec<f64>, u32)> = (0..spec.n)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(spec.seed, i as u64);
            let b = pick.sample(&mut rng);
            (sample_in_ball(&mut rng, &spec.centers[b], spec.radius), b as u32)
        })
        .collect();
    collect_rows(rows, spec.dim)
}

fn collect_rows(rows: Vec<(Vec<f64>, u32)>, dim: usize) -> Result<Dataset> {
    let mut values = Vec::with_capacity(rows.len() * dim);
    let mut truth = Vec::with_capacity(rows.len());
    for (p, l) in rows {
        values.extend(p);
        truth.push(l);
    }
    Dataset::new(values, dim)?.with_truth(truth)
}

/// A ball-shaped region.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Low-density region kept away from the clusters.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseRegion {
    Shell { center: Vec<f64>, inner: f64, outer: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl NoiseRegion {
    fn volume(&self, dim: usize) -> f64 {
        match self {
            NoiseRegion::Shell { inner, outer, .. } => {
                ball_volume(dim, *outer) - ball_volume(dim, *inner)
            }
            NoiseRegion::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| h - l).product(),
        }
    }

    /// Distance from a ball's surface to the region (negative on overlap).
    fn gap_to(&self, ball: &Ball) -> f64 {
        match self {
            NoiseRegion::Shell { center, inner, outer } => {
                let d = distance(center, &ball.center);
                let inside = inner - (d + ball.radius);
                let outside = d - ball.radius - outer;
                inside.max(outside)
            }
            NoiseRegion::Box { lo, hi } => {
                let d: f64 = ball
                    .center
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(c, (l, h))| {
                        let e = (l - c).max(c - h).max(0.0);
                        e * e
                    })
                    .sum::<f64>()
                    .sqrt();
                d - ball.radius
            }
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            NoiseRegion::Shell { center, inner, outer } => sample_in_shell(rng, center, *inner, *outer),
            NoiseRegion::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| l + rng.random::<f64>() * (h - l))
                .collect(),
        }
    }

    fn dim(&self) -> usize {
        match self {
            NoiseRegion::Shell { center, .. } => center.len(),
            NoiseRegion::Box { lo, .. } => lo.len(),
        }
    }
}

/// Piecewise-constant density: level `lambda_c` on every cluster ball,
/// `lambda_n` on the noise region, zero elsewhere (before normalisation).
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryScenario {
    pub dim: usize,
    pub clusters: Vec<Ball>,
    pub lambda_c: f64,
    pub noise: Option<NoiseRegion>,
    pub lambda_n: f64,
    /// Required separation between regions.
    pub r_s: f64,
    /// Thinness constant valid for scales below `r0`.
    pub rho: f64,
    pub r0: f64,
}

impl TheoryScenario {
    /// Noise-free scenario matching an equal-radius ball mixture; `rho` is
    /// the boundary thinness at scale `r0 = radius`.
    pub fn from_ball_mixture(spec: &BallMixtureSpec) -> Result<Self> {
        spec.validate()?;
        let vol = ball_volume(spec.dim, spec.radius);
        let lambda_c = spec
            .weights
            .iter()
            .filter(|w| **w > 0.0)
            .fold(f64::INFINITY, |m, w| m.min(w / vol));
        let r_s = if spec.centers.len() > 1 { spec.separation() } else { f64::INFINITY };
        Ok(Self {
            dim: spec.dim,
            clusters: spec
                .centers
                .iter()
                .map(|c| Ball { center: c.clone(), radius: spec.radius })
                .collect(),
            lambda_c,
            noise: None,
            lambda_n: 0.0,
            r_s,
            rho: ball_thinness(spec.dim, spec.radius, spec.radius),
            r0: spec.radius,
        })
    }

    /// Uniform unit-radius ball (disk when `dim = 2`) at the origin.
    pub fn unit_ball(dim: usize) -> Self {
        Self {
            dim,
            clusters: vec![Ball { center: vec![0.0; dim], radius: 1.0 }],
            lambda_c: 1.0 / unit_ball_volume(dim),
            noise: None,
            lambda_n: 0.0,
            r_s: f64::INFINITY,
            rho: ball_thinness(dim, 1.0, 1.0),
            r0: 1.0,
        }
    }

    fn masses(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self
            .clusters
            .iter()
            .map(|b| self.lambda_c * ball_volume(self.dim, b.radius))
            .collect();
        if let Some(noise) = &self.noise {
            m.push(self.lambda_n * noise.volume(self.dim));
        }
        m
    }

    /// Total unnormalised mass.
    pub fn normaliser(&self) -> f64 {
        self.masses().iter().sum()
    }

    /// `(lambda_c, lambda_n)` divided by the normaliser, i.e. the actual
    /// density levels of the sampling distribution.
    pub fn normalized_levels(&self) -> (f64, f64) {
        let z = self.normaliser();
        (self.lambda_c / z, self.lambda_n / z)
    }

    /// Truth label given to noise points.
    pub fn noise_label(&self) -> u32 {
        self.clusters.len() as u32
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.clusters.is_empty() {
            return Err(Error::Contract("scenario needs dim >= 1 and at least one cluster".into()));
        }
        let dims_ok = self.clusters.iter().all(|b| b.center.len() == self.dim && b.radius > 0.0)
            && self.noise.as_ref().is_none_or(|r| r.dim() == self.dim);
        if !dims_ok {
            return Err(Error::Contract("region dimension or radius mismatch".into()));
        }
        if self.lambda_c < 0.0 || self.lambda_n < 0.0 {
            return Err(Error::param("lambda", "density levels must be non-negative"));
        }
        if !(self.normaliser() > 0.0) {
            return Err(Error::Contract("scenario density is not normalisable (total mass 0)".into()));
        }
        if !(self.rho * self.lambda_c > self.lambda_n) {
            return Err(Error::Contract(format!(
                "cluster level rho*lambda_c = {} must exceed noise level {}",
                self.rho * self.lambda_c,
                self.lambda_n
            )));
        }
        for i in 0..self.clusters.len() {
            for j in i + 1..self.clusters.len() {
                let (a, b) = (&self.clusters[i], &self.clusters[j]);
                let gap = distance(&a.center, &b.center) - a.radius - b.radius;
                if gap < self.r_s {
                    return Err(Error::Contract(format!(
                        "clusters {i} and {j} are {gap} apart, below r_s = {}",
                        self.r_s
                    )));
                }
            }
            if let Some(noise) = &self.noise {
                let gap = noise.gap_to(&self.clusters[i]);
                if gap < self.r_s {
                    return Err(Error::Contract(format!(
                        "noise region is {gap} from cluster {i}, below r_s = {}",
                        self.r_s
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Draw `n` points; truth is the cluster index, or [`TheoryScenario::noise_label`].
pub fn generate_theory_scenario(ts: &TheoryScenario, n: usize, seed: u64) -> Result<Dataset> {
    ts.validate()?;
    if n == 0 {
        return Err(Error::Contract("n must be at least 1".into()));
    }
    let pick = WeightedIndex::new(ts.masses())
        .map_err(|e| Error::Contract(format!("scenario weights: {e}")))?;
    let k = ts.clusters.len();
    let rows: Vec<(Vec<f64>, u32)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let region = pick.sample(&mut rng);
            if region < k {
                let b = &ts.clusters[region];
                (sample_in_ball(&mut rng, &b.center, b.radius), region as u32)
            } else {
                let noise = ts.noise.as_ref().expect("noise mass implies a region");
                (noise.sample(&mut rng), k as u32)
            }
        })
        .collect();
    collect_rows(rows, ts.dim)
}

/// Equal-weight mixture of radial bumps with a flat top:
/// `f(r) = h` for `r <= plateau`, `h - c (r - plateau)^beta` up to
/// `support`, zero beyond. With `plateau = 0` this is `max(0, h - c r^beta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetScenario {
    pub dim: usize,
    pub centers: Vec<Vec<f64>>,
    pub plateau: f64,
    pub support: f64,
    pub beta: f64,
    /// Density level whose upper level set is estimated.
    pub level: f64,
    /// Confidence parameter of the rate bound.
    pub delta: f64,
}

impl LevelSetScenario {
    /// Single bump in the plane, level at the plateau height.
    pub fn single_bump(dim: usize, plateau: f64, support: f64, beta: f64) -> Self {
        let mut s = Self {
            dim,
            centers: vec![vec![0.0; dim]],
            plateau,
            support,
            beta,
            level: 0.0,
            delta: 0.1,
        };
        s.level = s.peak();
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.centers.is_empty() || self.centers.iter().any(|c| c.len() != self.dim) {
            return Err(Error::Contract("bump centers must match the dimension".into()));
        }
        if !(self.beta > 0.0) {
            return Err(Error::param("beta", "must be positive"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param("delta", "must lie in (0, 1)"));
        }
        if !(self.plateau >= 0.0 && self.plateau < self.support) {
            return Err(Error::param("plateau", "need 0 <= plateau < support"));
        }
        for i in 0..self.centers.len() {
            for j in i + 1..self.centers.len() {
                if distance(&self.centers[i], &self.centers[j]) <= 2.0 * self.support {
                    return Err(Error::Contract(format!("bumps {i} and {j} overlap")));
                }
            }
        }
        if self.level > self.peak() * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "level {} exceeds the maximum density {}: empty level set",
                self.level,
                self.peak()
            )));
        }
        Ok(())
    }

    /// `m(h=1)`: mass of one bump per unit height.
    fn unit_mass(&self) -> f64 {
        let d = self.dim as i32;
        let (a, big_r) = (self.plateau, self.support);
        let span = big_r - a;
        let mut sum = 0.0;
        for j in 0..self.dim {
            sum += binomial(self.dim - 1, j) * a.powi(d - 1 - j as i32) * span.powi(j as i32 + 1)
                / (self.beta + j as f64 + 1.0);
        }
        unit_ball_volume(self.dim) * (big_r.powi(d) - self.dim as f64 * sum)
    }

    /// Peak density `h`.
    pub fn peak(&self) -> f64 {
        1.0 / (self.centers.len() as f64 * self.unit_mass())
    }

    /// Decay coefficient `c = h / (support - plateau)^beta`.
    pub fn slope(&self) -> f64 {
        self.peak() / (self.support - self.plateau).powf(self.beta)
    }

    fn profile(&self, r: f64) -> f64 {
        if r <= self.plateau {
            self.peak()
        } else if r < self.support {
            self.peak() - self.slope() * (r - self.plateau).powf(self.beta)
        } else {
            0.0
        }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        self.centers.iter().map(|c| self.profile(distance(x, c))).fold(0.0, f64::max)
    }

    /// Radius of each bump's slice of `L_f(level)`.
    pub fn level_radius(&self) -> Result<f64> {
        let h = self.peak();
        if self.level > h * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "level {} exceeds the maximum density {h}: empty level set",
                self.level
            )));
        }
        if self.level <= 0.0 {
            return Ok(self.support);
        }
        let frac = (1.0 - self.level / h).max(0.0);
        Ok(self.plateau + (self.support - self.plateau) * frac.powf(1.0 / self.beta))
    }

    /// Whether `x` lies in the true level set.
    pub fn in_level_set(&self, x: &[f64]) -> Result<bool> {
        let r = self.level_radius()?;
        Ok(self.centers.iter().any(|c| distance(x, c) <= r))
    }

    /// Constants `(c_lo, c_hi)` with `c_lo d^beta <= level - f <= c_hi d^beta`
    /// near the boundary. Exact (both equal the slope) at the plateau level,
    /// or for `beta = 1`; `None` otherwise.
    pub fn regularity(&self) -> Option<(f64, f64)> {
        let at_plateau = (self.level - self.peak()).abs() <= 1e-12 * self.peak();
        if at_plateau || (self.beta - 1.0).abs() < 1e-12 {
            Some((self.slope(), self.slope()))
        } else {
            None
        }
    }

    /// Probability mass of one bump within distance `r` of its center,
    /// normalised to 1 at the support radius.
    pub fn radial_cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let r = r.min(self.support);
        let d = self.dim as i32;
        let h = self.peak();
        let vd = unit_ball_volume(self.dim);
        let mut mass = h * vd * r.powi(d);
        if r > self.plateau {
            let a = self.plateau;
            let span = r - a;
            let mut sum = 0.0;
            for j in 0..self.dim {
                sum += binomial(self.dim - 1, j)
                    * a.powi(d - 1 - j as i32)
                    * span.powf(self.beta + j as f64 + 1.0)
                    / (self.beta + j as f64 + 1.0);
            }
            mass -= self.slope() * self.dim as f64 * vd * sum;
        }
        mass * self.centers.len() as f64
    }

    /// `count` points of the true level set: half on its boundary spheres,
    /// half uniform in its interior.
    pub fn level_set_sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let r = self.level_radius()?;
        let k = self.centers.len();
        Ok((0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(seed, i as u64);
                let c = &self.centers[i % k];
                if i % 2 == 0 {
                    sample_on_sphere(&mut rng, c, r)
                } else {
                    sample_in_ball(&mut rng, c, r)
                }
            })
            .collect())
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Rejection sampling from the bump mixture; truth is the bump index.
pub fn generate_levelset_scenario(ls: &LevelSetScenario, n: usize, seed: u64) -> Result<Dataset> {
    ls.validate()?;
    if n == 0 {
        return Err(Error::Contract("n must be at least 1".into()));
    }
    let h = ls.peak();
    let k = ls.centers.len();
    let rows: Vec<(Vec<f64>, u32)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let b = rng.random_range(0..k);
            let c = &ls.centers[b];
            loop {
                let x = sample_in_ball(&mut rng, c, ls.support);
                if rng.random::<f64>() * h < ls.profile(distance(&x, c)) {
                    return (x, b as u32);
                }
            }
        })
        .collect();
    collect_rows(rows, ls.dim)
}
