use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;
use sng_dbscan::cluster::{dbscan_exact_run, scaled_min_pts, sng_dbscan_run};
use sng_dbscan::config::load_scenario;
use sng_dbscan::dataset::{
    load_binary, load_csv, load_labels, save_binary, save_csv, save_clustering, save_labels, CsvOptions,
};
use sng_dbscan::lab::mean_stderr;
use sng_dbscan::metrics::scores;
use sng_dbscan::rng::derive_seed;
use sng_dbscan::{ClusterRun, Dataset, SngParams};

use crate::args::{BenchArgs, ClusterArgs, GenArgs, InputArgs, SamplingArgs, ScoreArgs};
use crate::{input_error, CliError};

fn load_input(a: &InputArgs) -> Result<Dataset, CliError> {
    let is_bin = a.input.extension().is_some_and(|e| e == "bin");
    let data = if is_bin {
        load_binary(&a.input)
    } else {
        load_csv(&a.input, CsvOptions { label_column: a.label_column, header: a.header })
    };
    data.map_err(input_error)
}

fn effective_min_pts(min_pts: u64, s: &SamplingArgs) -> usize {
    let m = min_pts as usize;
    if s.minpts_scale {
        scaled_min_pts(m, s.rate)
    } else {
        m
    }
}

fn default_labels_path(input: &Path) -> PathBuf {
    input.with_extension("labels")
}

pub fn cluster(a: ClusterArgs) -> Result<(), CliError> {
    let data = load_input(&a.input)?;
    let min_pts = effective_min_pts(a.min_pts, &a.sampling);
    let params = SngParams::new(a.eps, min_pts, a.sampling.rate)
        .with_seed(a.sampling.seed)
        .with_dist(a.sampling.dist.clone());
    let run = sng_dbscan_run(&data, &params)?;
    let out = a.output.unwrap_or_else(|| default_labels_path(&a.input.input));
    save_clustering(&run.clustering, &out)?;
    let c = &run.clustering;
    let ms = run.elapsed.as_secs_f64() * 1e3;
    if a.json {
        let v = json!({
            "n": c.n(),
            "k": c.k(),
            "noise": c.noise_count(),
            "edges": run.edge_count,
            "distance_evals": run.distance_evals,
            "ms": ms,
            "labels": out.display().to_string(),
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        println!("n\t{}", c.n());
        println!("k\t{}", c.k());
        println!("noise\t{}", c.noise_count());
        println!("edges\t{}", run.edge_count);
        println!("distance_evals\t{}", run.distance_evals);
        println!("ms\t{ms:.3}");
    }
    Ok(())
}

pub fn score(a: ScoreArgs) -> Result<(), CliError> {
    let pred = load_labels(&a.pred).map_err(input_error)?;
    let truth = load_labels(&a.truth).map_err(input_error)?;
    let (ari, ami) = scores(&pred, &truth, a.noise_policy)?;
    if a.json {
        println!("{}", json!({ "ari": ari, "ami": ami }));
    } else {
        println!("ari\t{ari:.6}");
        println!("ami\t{ami:.6}");
    }
    Ok(())
}

pub fn gen(a: GenArgs) -> Result<(), CliError> {
    let mut cfg = load_scenario(&a.config).map_err(input_error)?;
    if let Some(seed) = a.seed {
        cfg.set_seed(seed);
    }
    let cfg = match a.n {
        Some(n) => with_n(cfg, n as usize),
        None => cfg,
    };
    let data = cfg.generate()?;
    if a.output.extension().is_some_and(|e| e == "bin") {
        save_binary(&data, &a.output)?;
    } else {
        save_csv(&data, &a.output)?;
    }
    if let Some(path) = &a.labels {
        let truth: Vec<i64> = data.truth().unwrap_or(&[]).iter().map(|&t| i64::from(t)).collect();
        save_labels(&truth, path)?;
    }
    eprintln!("wrote {} points in {} dimensions to {}", data.n(), data.dim(), a.output.display());
    Ok(())
}

fn with_n(cfg: sng_dbscan::config::ScenarioConfig, n: usize) -> sng_dbscan::config::ScenarioConfig {
    use sng_dbscan::config::ScenarioConfig as S;
    match cfg {
        S::Balls(mut s) => {
            s.n = n;
            S::Balls(s)
        }
        S::Theory { scenario, seed, .. } => S::Theory { scenario, n, seed },
        S::LevelSet { scenario, seed, .. } => S::LevelSet { scenario, n, seed },
    }
}

struct BenchRow {
    method: &'static str,
    eps: f64,
    rate: f64,
    min_pts: usize,
    ms: Vec<f64>,
    edges: Vec<f64>,
    distance_evals: u64,
    graph_bytes: usize,
    ari: Vec<f64>,
    ami: Vec<f64>,
}

impl BenchRow {
    fn new(method: &'static str, eps: f64, rate: f64, min_pts: usize) -> Self {
        Self {
            method,
            eps,
            rate,
            min_pts,
            ms: Vec::new(),
            edges: Vec::new(),
            distance_evals: 0,
            graph_bytes: 0,
            ari: Vec::new(),
            ami: Vec::new(),
        }
    }

    fn record(&mut self, run: &ClusterRun, truth: Option<&[i64]>, policy: sng_dbscan::NoisePolicy) -> Result<(), CliError> {
        self.ms.push(run.elapsed.as_secs_f64() * 1e3);
        self.edges.push(run.edge_count as f64);
        self.distance_evals = run.distance_evals;
        self.graph_bytes = self.graph_bytes.max(run.graph_bytes);
        if let Some(t) = truth {
            let (a, m) = scores(&run.clustering.labels(), t, policy)?;
            self.ari.push(a);
            self.ami.push(m);
        }
        Ok(())
    }
}

fn opt_mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| mean_stderr(v).0)
}

pub fn bench(a: BenchArgs) -> Result<(), CliError> {
    let data = load_input(&a.input)?;
    let truth: Option<Vec<i64>> = data.truth().map(|t| t.iter().map(|&x| i64::from(x)).collect());
    let min_pts = effective_min_pts(a.min_pts, &a.sampling);
    let mut rows = Vec::new();
    for &eps in &a.eps {
        let mut row = BenchRow::new("sng", eps, a.sampling.rate, min_pts);
        for r in 0..a.repeats {
            let params = SngParams::new(eps, min_pts, a.sampling.rate)
                .with_seed(derive_seed(a.sampling.seed, r))
                .with_dist(a.sampling.dist.clone());
            row.record(&sng_dbscan_run(&data, &params)?, truth.as_deref(), a.noise_policy)?;
        }
        rows.push(row);
        if a.exact {
            let m = a.min_pts as usize;
            let mut row = BenchRow::new("exact", eps, 1.0, m);
            for _ in 0..a.repeats {
                let run = dbscan_exact_run(&data, eps, m, &a.sampling.dist)?;
                row.record(&run, truth.as_deref(), a.noise_policy)?;
            }
            rows.push(row);
        }
    }

    if a.json {
        let v: Vec<_> = rows
            .iter()
            .map(|r| {
                let (ms, se) = mean_stderr(&r.ms);
                json!({
                    "method": r.method,
                    "eps": r.eps,
                    "rate": r.rate,
                    "min_pts": r.min_pts,
                    "runs": r.ms.len(),
                    "ms_mean": ms,
                    "ms_stderr": se,
                    "edges": mean_stderr(&r.edges).0,
                    "distance_evals": r.distance_evals,
                    "graph_bytes": r.graph_bytes,
                    "ari": opt_mean(&r.ari),
                    "ami": opt_mean(&r.ami),
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        return Ok(());
    }
    let mut out = String::from(
        "method\teps\trate\tmin_pts\truns\tms_mean\tms_stderr\tedges\tdistance_evals\tgraph_bytes\tari\tami\n",
    );
    let cell = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into());
    for r in &rows {
        let (ms, se) = mean_stderr(&r.ms);
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{:.3}\t{}\t{:.1}\t{}\t{}\t{}\t{}",
            r.method,
            r.eps,
            r.rate,
            r.min_pts,
            r.ms.len(),
            ms,
            se.map(|s| format!("{s:.3}")).unwrap_or_else(|| "-".into()),
            mean_stderr(&r.edges).0,
            r.distance_evals,
            r.graph_bytes,
            cell(opt_mean(&r.ari)),
            cell(opt_mean(&r.ami)),
        )
        .unwrap();
    }
    print!("{out}");
    Ok(())
}
