//! `key = value` scenario files for the generators.
//!
//! ```text
//! # three unit balls
//! kind = balls
//! n = 10000
//! dim = 3
//! radius = 1
//! centers = 0,0,0; 6,0,0; 3,5.196,0
//! weights = 0.3333, 0.3333, 0.3334
//! seed = 7
//! ```
//!
//! `kind` is one of `balls`, `theory` or `levelset`. Theory scenarios add
//! `lambda_c`, `lambda_n` and `r_s`; a positive `lambda_n` puts a noise shell
//! of thickness `radius` around the clusters, `r_s` beyond the farthest one.
//! Level-set scenarios read `radius` as the bump support and take `beta`,
//! `level` (default: the peak), `plateau` (default 0) and `delta`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::synthetic::{
    ball_thinness, Ball, BallMixtureSpec, LevelSetScenario, NoiseRegion, TheoryScenario,
};

const KEYS: &[&str] = &[
    "kind", "n", "dim", "radius", "centers", "weights", "lambda_c", "lambda_n", "r_s", "beta",
    "level", "seed", "plateau", "delta",
];

/// A parsed scenario file.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioConfig {
    Balls(BallMixtureSpec),
    Theory { scenario: TheoryScenario, n: usize, seed: u64 },
    LevelSet { scenario: LevelSetScenario, n: usize, seed: u64 },
}

impl ScenarioConfig {
    pub fn n(&self) -> usize {
        match self {
            ScenarioConfig::Balls(s) => s.n,
            ScenarioConfig::Theory { n, .. } | ScenarioConfig::LevelSet { n, .. } => *n,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ScenarioConfig::Balls(s) => s.seed,
            ScenarioConfig::Theory { seed, .. } | ScenarioConfig::LevelSet { seed, .. } => *seed,
        }
    }

    pub fn set_seed(&mut self, new: u64) {
        match self {
            ScenarioConfig::Balls(s) => s.seed = new,
            ScenarioConfig::Theory { seed, .. } | ScenarioConfig::LevelSet { seed, .. } => *seed = new,
        }
    }

    pub fn generate(&self) -> Result<crate::Dataset> {
        use crate::synthetic::*;
        match self {
            ScenarioConfig::Balls(s) => generate_ball_mixture(s),
            ScenarioConfig::Theory { scenario, n, seed } => generate_theory_scenario(scenario, *n, *seed),
            ScenarioConfig::LevelSet { scenario, n, seed } => {
                generate_levelset_scenario(scenario, *n, *seed)
            }
        }
    }
}

/// Split `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, reason: "expected key = value".into() })?;
        let k = k.trim().to_ascii_lowercase();
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Parse { line: i + 1, reason: format!("duplicate key `{k}`") });
        }
    }
    Ok(out)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let kv = parse_key_values(text)?;
    if let Some(k) = kv.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(Error::Config(format!("unknown key `{k}`")));
    }
    let get = |k: &str| kv.get(k).map(String::as_str);
    let num = |k: &str| -> Result<Option<f64>> {
        get(k)
            .map(|v| v.parse::<f64>().map_err(|_| Error::Config(format!("`{k}` is not a number: {v}"))))
            .transpose()
    };
    let int = |k: &str| -> Result<Option<u64>> {
        get(k)
            .map(|v| v.parse::<u64>().map_err(|_| Error::Config(format!("`{k}` is not an integer: {v}"))))
            .transpose()
    };
    let need = |k: &str, v: Option<f64>| v.ok_or_else(|| Error::Config(format!("missing key `{k}`")));

    let kind = get("kind").unwrap_or("balls");
    let n = int("n")?.ok_or_else(|| Error::Config("missing key `n`".into()))? as usize;
    let seed = int("seed")?.unwrap_or(0);
    let dim_key = int("dim")?.map(|d| d as usize);
    let centers = get("centers").map(parse_centers).transpose()?;
    let dim = match (dim_key, &centers) {
        (Some(d), _) => d,
        (None, Some(c)) => c[0].len(),
        (None, None) => return Err(Error::Config("need `dim` or `centers`".into())),
    };
    let centers = centers.unwrap_or_else(|| vec![vec![0.0; dim]]);
    let radius = num("radius")?.unwrap_or(1.0);

    match kind {
        "balls" => {
            let weights = match get("weights") {
                Some(w) => parse_list(w)?,
                None => vec![1.0 / centers.len() as f64; centers.len()],
            };
            let spec = BallMixtureSpec { n, dim, centers, radius, weights, seed };
            spec.validate()?;
            Ok(ScenarioConfig::Balls(spec))
        }
        "theory" => {
            let lambda_c = need("lambda_c", num("lambda_c")?)?;
            let lambda_n = num("lambda_n")?.unwrap_or(0.0);
            let r_s = need("r_s", num("r_s")?)?;
            let noise = (lambda_n > 0.0).then(|| noise_shell(&centers, radius, r_s));
            let scenario = TheoryScenario {
                dim,
                clusters: centers.iter().map(|c| Ball { center: c.clone(), radius }).collect(),
                lambda_c,
                noise,
                lambda_n,
                r_s,
                rho: ball_thinness(dim, radius, radius),
                r0: radius,
            };
            scenario.validate()?;
            Ok(ScenarioConfig::Theory { scenario, n, seed })
        }
        "levelset" => {
            let beta = num("beta")?.unwrap_or(1.0);
            let plateau = num("plateau")?.unwrap_or(0.0);
            let mut scenario = LevelSetScenario::single_bump(dim, plateau, radius, beta);
            scenario.centers = centers;
            scenario.level = match num("level")? {
                Some(l) => l,
                None => scenario.peak(),
            };
            if let Some(d) = num("delta")? {
                scenario.delta = d;
            }
            scenario.validate()?;
            Ok(ScenarioConfig::LevelSet { scenario, n, seed })
        }
        other => Err(Error::Config(format!(
            "unknown kind `{other}` (expected balls, theory or levelset)"
        ))),
    }
}

fn noise_shell(centers: &[Vec<f64>], radius: f64, r_s: f64) -> NoiseRegion {
    let dim = centers[0].len();
    let mid: Vec<f64> = (0..dim)
        .map(|j| centers.iter().map(|c| c[j]).sum::<f64>() / centers.len() as f64)
        .collect();
    let reach = centers
        .iter()
        .map(|c| c.iter().zip(&mid).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let inner = reach + radius + r_s;
    NoiseRegion::Shell { center: mid, inner, outer: inner + radius }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().map_err(|_| Error::Config(format!("not a number: `{t}`")))
        })
        .collect()
}

/// `;`-separated points of `,`-separated coordinates.
fn parse_centers(s: &str) -> Result<Vec<Vec<f64>>> {
    let pts: Vec<Vec<f64>> = s.split(';').filter(|p| !p.trim().is_empty()).map(parse_list).collect::<Result<_>>()?;
    match pts.first() {
        None => Err(Error::Config("`centers` is empty".into())),
        Some(p) if pts.iter().any(|q| q.len() != p.len()) => {
            Err(Error::Config("`centers` rows differ in length".into()))
        }
        Some(_) => Ok(pts),
    }
}
