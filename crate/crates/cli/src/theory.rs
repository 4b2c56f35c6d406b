use std::fs;

use sng_dbscan::config::{load_scenario, ScenarioConfig};
use sng_dbscan::graph::{build_full_graph, min_cut, pair_inclusion_probability, DistanceSpec, SampledGraph};
use sng_dbscan::lab::{
    compute_minpts_window, karger_connectivity_trial, levelset_experiment, mincut_scaling_experiment,
    recovery_experiment, ExperimentReport, LevelSetConfig, RecoveryConfig,
};
use sng_dbscan::synthetic::{generate_theory_scenario, BallMixtureSpec, LevelSetScenario, TheoryScenario};

use crate::args::{Experiment, TheoryArgs};
use crate::{input_error, CliError};

pub fn run(a: TheoryArgs) -> Result<(), CliError> {
    let config = match &a.config {
        Some(p) => Some(load_scenario(p).map_err(input_error)?),
        None => None,
    };
    let (report, check) = match a.experiment {
        Experiment::Window => window(&a, config)?,
        Experiment::Mincut => mincut(&a, config)?,
        Experiment::Karger => karger(&a, config)?,
        Experiment::Recovery => recovery(&a, config)?,
        Experiment::Levelset => levelset(&a, config)?,
    };
    let text = if a.json { report.to_json() + "\n" } else { report.to_tsv() };
    match &a.output {
        Some(p) => fs::write(p, &text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    match check {
        Err(msg) if a.assert => Err(CliError::Assert(msg)),
        _ => Ok(()),
    }
}

type Outcome = (ExperimentReport, Result<(), String>);

/// Theory scenario from a `theory` or `balls` config file, with the sample
/// size and seed the file carries.
fn theory_scenario(config: Option<ScenarioConfig>) -> Result<Option<(TheoryScenario, usize, u64)>, CliError> {
    match config {
        None => Ok(None),
        Some(ScenarioConfig::Theory { scenario, n, seed }) => Ok(Some((scenario, n, seed))),
        Some(ScenarioConfig::Balls(spec)) => {
            Ok(Some((TheoryScenario::from_ball_mixture(&spec)?, spec.n, spec.seed)))
        }
        Some(ScenarioConfig::LevelSet { .. }) => {
            Err(CliError::Usage("this experiment needs a `balls` or `theory` scenario".into()))
        }
    }
}

fn window(a: &TheoryArgs, config: Option<ScenarioConfig>) -> Result<Outcome, CliError> {
    let (ts, file_n) = match theory_scenario(config)? {
        Some((ts, n, _)) => (ts, n),
        None => {
            let spec = BallMixtureSpec::three_balls(10_000, 0);
            (TheoryScenario::from_ball_mixture(&spec)?, spec.n)
        }
    };
    let n = a.n.map_or(file_n, |n| n as usize);
    let eps = a.eps.unwrap_or(0.8);
    let rate = a.rate.unwrap_or(1.0);
    let s = pair_inclusion_probability(n, rate).max(f64::MIN_POSITIVE);
    let w = compute_minpts_window(&ts, eps, s, n)?;

    let mut rep = ExperimentReport::new("window", a.seed);
    let cfg = format!("n={n},eps={eps},rate={rate}");
    rep.push(&cfg, "lo", w.lo);
    rep.push(&cfg, "hi", w.hi);
    rep.push(&cfg, "pair_rate", s);
    rep.push(&cfg, "sn", w.sn);
    rep.push(&cfg, "valid", f64::from(u8::from(w.is_valid())));
    rep.push(&cfg, "precondition_ok", f64::from(u8::from(w.precondition_ok)));
    let mid = w.midpoint_min_pts();
    rep.push(&cfg, "midpoint_min_pts", mid as f64);
    rep.push(&cfg, "midpoint_margin", w.margin(mid));
    if let Some((lo, hi)) = w.integer_range() {
        rep.push(&cfg, "min_pts_first", lo as f64);
        rep.push(&cfg, "min_pts_last", hi as f64);
    }
    if !w.precondition_ok {
        eprintln!("warning: eps is not below min(r0, r_s); the window carries no guarantee");
    }
    let check = if !w.is_valid() {
        Err(format!("empty window: lo {} >= hi {}", w.lo, w.hi))
    } else if !w.precondition_ok {
        Err("eps violates the precondition eps < min(r0, r_s)".into())
    } else {
        Ok(())
    };
    Ok((rep, check))
}

fn mincut(a: &TheoryArgs, config: Option<ScenarioConfig>) -> Result<Outcome, CliError> {
    let ts = theory_scenario(config)?.map_or_else(|| TheoryScenario::unit_ball(2), |t| t.0);
    let eps = a.eps.unwrap_or(0.4);
    let grid = if a.n_grid.is_empty() { vec![250, 500, 1000] } else { a.n_grid.clone() };
    let seeds = a.seeds.unwrap_or(5) as usize;
    let res = mincut_scaling_experiment(&ts, eps, &grid, seeds, a.seed)?;

    let check = (|| {
        if let Some(c) = res.cells.iter().find(|c| c.min_cut.is_some_and(|m| m > c.min_degree as u64)) {
            return Err(format!("min cut above min degree at n={}", c.n));
        }
        if let Some(c) = res.cells.iter().find(|c| !c.connected) {
            return Err(format!("cluster graph disconnected at n={}", c.n));
        }
        let first = res.mean_ratio(grid[0]);
        let last = res.mean_ratio(*grid.last().expect("non-empty grid"));
        match (first, last) {
            (Some(f), Some(l)) if l >= 0.5 * f => Ok(()),
            (Some(f), Some(l)) => Err(format!("min_cut/n fell from {f} to {l}")),
            _ => Err("no connected draws".into()),
        }
    })();
    Ok((res.report(a.seed), check))
}

fn karger_graph(a: &TheoryArgs, config: Option<ScenarioConfig>) -> Result<SampledGraph, CliError> {
    let bad = || CliError::Usage(format!("--graph must be complete:N or ball:N, got `{}`", a.graph));
    let (kind, size) = a.graph.split_once(':').ok_or_else(bad)?;
    let n: usize = size.trim().parse().map_err(|_| bad())?;
    if n < 2 {
        return Err(CliError::Usage("--graph needs at least two vertices".into()));
    }
    match kind {
        "complete" => Ok(SampledGraph::from_edges(
            n,
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))),
        )?),
        "ball" => {
            let ts = theory_scenario(config)?.map_or_else(|| TheoryScenario::unit_ball(2), |t| t.0);
            let eps = a.eps.unwrap_or(0.5);
            let data = generate_theory_scenario(&ts, n, a.seed)?;
            let members: Vec<usize> = data
                .truth()
                .expect("scenario data carries labels")
                .iter()
                .enumerate()
                .filter_map(|(i, &l)| (l == 0).then_some(i))
                .collect();
            let g = build_full_graph(&data, eps, &DistanceSpec::Euclidean)?;
            Ok(g.induced(&members)?)
        }
        _ => Err(bad()),
    }
}

fn karger(a: &TheoryArgs, config: Option<ScenarioConfig>) -> Result<Outcome, CliError> {
    let g = karger_graph(a, config)?;
    let grid = if a.s_grid.is_empty() {
        if !g.is_connected() {
            return Err(CliError::Usage("the chosen graph is disconnected".into()));
        }
        let shape = (g.n() as f64).ln() / min_cut(&g)? as f64;
        let (lo, hi) = (0.2 * shape, 2.0 * shape);
        (0..7)
            .map(|i| (lo * (hi / lo).powf(i as f64 / 6.0)).min(1.0))
            .collect()
    } else {
        a.s_grid.clone()
    };
    let res = karger_connectivity_trial(&g, &grid, a.trials as usize, a.seed)?;
    let check = res
        .rows
        .windows(2)
        .find(|w| {
            let slack = 2.0 * (w[0].stderr().powi(2) + w[1].stderr().powi(2)).sqrt();
            w[1].rate >= w[0].rate && w[1].frequency() + slack < w[0].frequency()
        })
        .map_or(Ok(()), |w| {
            Err(format!("connectivity dropped between s={} and s={}", w[0].rate, w[1].rate))
        });
    Ok((res.report(a.seed), check))
}

fn recovery(a: &TheoryArgs, config: Option<ScenarioConfig>) -> Result<Outcome, CliError> {
    let spec = match config {
        None => BallMixtureSpec::three_balls(1_000, 0),
        Some(ScenarioConfig::Balls(spec)) => spec,
        Some(_) => return Err(CliError::Usage("recovery needs a `balls` scenario".into())),
    };
    let mut cfg = RecoveryConfig { multiplier: a.multiplier, base_seed: a.seed, ..Default::default() };
    if !a.n_grid.is_empty() {
        cfg.n_grid = a.n_grid.clone();
    }
    if let Some(eps) = a.eps {
        cfg.eps = eps;
    }
    if let Some(s) = a.seeds {
        cfg.seeds = s as usize;
    }
    let res = recovery_experiment(&spec, &cfg)?;
    let last = *cfg.n_grid.last().expect("non-empty grid");
    let (ari, ami) = (res.mean_ari(last), res.mean_ami(last));
    let check = if ari >= 0.99 && ami >= 0.99 {
        Ok(())
    } else {
        Err(format!("at n={last} mean ARI {ari:.4}, AMI {ami:.4} (need 0.99)"))
    };
    Ok((res.report(), check))
}

fn levelset(a: &TheoryArgs, config: Option<ScenarioConfig>) -> Result<Outcome, CliError> {
    let ls = match config {
        None => LevelSetScenario::single_bump(2, 0.4, 1.0, 1.0),
        Some(ScenarioConfig::LevelSet { scenario, .. }) => scenario,
        Some(_) => return Err(CliError::Usage("levelset needs a `levelset` scenario".into())),
    };
    let mut cfg = LevelSetConfig {
        base_seed: a.seed,
        truth_samples: a.truth_samples as usize,
        min_pts: a.min_pts.map(|m| m as usize),
        ..Default::default()
    };
    if !a.n_grid.is_empty() {
        cfg.n_grid = a.n_grid.clone();
    }
    if let Some(eps) = a.eps {
        cfg.eps = eps;
    }
    if let Some(r) = a.rate {
        cfg.rate = r;
    }
    if let Some(s) = a.seeds {
        cfg.seeds = s as usize;
    }
    let res = levelset_experiment(&ls, &cfg)?;
    let means: Vec<f64> = cfg.n_grid.iter().map(|&n| res.mean_hausdorff(n)).collect();
    let check = if means.iter().any(|m| !m.is_finite()) {
        Err("some draw left the level set without clustered points".into())
    } else if means.windows(2).any(|w| w[1] >= w[0]) {
        Err(format!("mean Hausdorff distance is not decreasing: {means:?}"))
    } else {
        Ok(())
    };
    Ok((res.report(), check))
}
