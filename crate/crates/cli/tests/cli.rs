use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use tempfile::TempDir;

fn sng(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sng"))
        .args(args)
        .current_dir(dir)
        .env_remove("SNG_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// Value of `key` in the `key\tvalue` summary the cluster command prints.
fn field<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('\t')))
        .unwrap_or_else(|| panic!("no `{key}` in {out}"))
}

/// Value column of the report row with the given statistic.
fn report_value(tsv: &str, statistic: &str) -> Vec<f64> {
    tsv.lines()
        .skip(1)
        .filter_map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            (cols[1] == statistic).then(|| cols[2].parse().unwrap())
        })
        .collect()
}

fn line_dataset(dir: &Path) {
    fs::write(dir.join("line.csv"), "0\n1\n5\n6\n").unwrap();
}

const BALLS: &str = "\
kind = balls
n = 600
dim = 2
radius = 1
centers = 0,0; 5,0
seed = 9
";

#[test]
fn cluster_four_point_line() {
    let dir = TempDir::new().unwrap();
    line_dataset(dir.path());
    let o = sng(&["cluster", "--input", "line.csv", "--eps", "1", "--min-pts", "1", "--rate", "1"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read_to_string(dir.path().join("line.labels")).unwrap(), "0\n0\n1\n1\n");
    let out = stdout(&o);
    assert_eq!(field(&out, "n"), "4");
    assert_eq!(field(&out, "k"), "2");
    assert_eq!(field(&out, "noise"), "0");
    assert_eq!(field(&out, "edges"), "2");
    assert_eq!(field(&out, "distance_evals"), "12");
    assert!(field(&out, "ms").parse::<f64>().is_ok());
}

#[test]
fn cluster_all_noise_is_success() {
    let dir = TempDir::new().unwrap();
    line_dataset(dir.path());
    let o = sng(
        &["cluster", "--input", "line.csv", "--eps", "0.1", "--min-pts", "2", "--output", "out.txt", "--json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["k"], 0);
    assert_eq!(v["noise"], 4);
    assert_eq!(fs::read_to_string(dir.path().join("out.txt")).unwrap(), "-1\n-1\n-1\n-1\n");
}

#[test]
fn missing_eps_is_usage_error() {
    let dir = TempDir::new().unwrap();
    line_dataset(dir.path());
    let o = sng(&["cluster", "--input", "line.csv", "--min-pts", "1"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("Usage"), "{}", stderr(&o));
}

#[test]
fn rate_outside_unit_interval_is_usage_error() {
    let dir = TempDir::new().unwrap();
    line_dataset(dir.path());
    for rate in ["1.5", "0", "-0.2"] {
        let o = sng(&["cluster", "--input", "line.csv", "--eps", "1", "--min-pts", "1", &format!("--rate={rate}")], dir.path());
        assert_eq!(code(&o), 2);
        assert!(stderr(&o).contains("(0, 1]"), "{}", stderr(&o));
    }
}

#[test]
fn missing_or_malformed_input_is_io_error() {
    let dir = TempDir::new().unwrap();
    let o = sng(&["cluster", "--input", "absent.csv", "--eps", "1", "--min-pts", "1"], dir.path());
    assert_eq!(code(&o), 3);
    fs::write(dir.path().join("bad.csv"), "1,2\n3\n").unwrap();
    let o = sng(&["cluster", "--input", "bad.csv", "--eps", "1", "--min-pts", "1"], dir.path());
    assert_eq!(code(&o), 3);
}

#[test]
fn score_examples() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("a.labels"), "0\n0\n1\n1\n2\n").unwrap();
    fs::write(d.join("noise.labels"), "-1\n-1\n-1\n-1\n-1\n").unwrap();
    fs::write(d.join("short.labels"), "0\n1\n").unwrap();

    let o = sng(&["score", "--pred", "a.labels", "--truth", "a.labels"], d);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "ari\t1.000000\nami\t1.000000\n");

    let o = sng(&["score", "--pred", "noise.labels", "--truth", "a.labels", "--noise-policy", "own-cluster"], d);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("ari\t0.000000\n"), "{}", stdout(&o));

    let o = sng(&["score", "--pred", "short.labels", "--truth", "a.labels"], d);
    assert_eq!(code(&o), 2);

    let o = sng(&["score", "--pred", "a.labels", "--truth", "a.labels", "--noise-policy", "bogus"], d);
    assert_eq!(code(&o), 2);
}

#[test]
fn gen_then_cluster_recovers_balls() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("balls.cfg"), BALLS).unwrap();
    let o = sng(&["gen", "--config", "balls.cfg", "--output", "balls.csv", "--labels", "truth.labels"], d);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(d.join("balls.csv")).unwrap();
    assert_eq!(csv.lines().count(), 600);
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 3);

    let o = sng(
        &["cluster", "--input", "balls.csv", "--label-column", "2", "--eps", "0.4", "--min-pts", "5", "--output", "pred.labels"],
        d,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = sng(&["score", "--pred", "pred.labels", "--truth", "truth.labels", "--json"], d);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["ari"].as_f64().unwrap() > 0.95, "{v}");

    // Binary output round-trips through the clusterer too.
    let o = sng(&["gen", "--config", "balls.cfg", "--output", "balls.bin", "--n", "100", "--seed", "3"], d);
    assert_eq!(code(&o), 0);
    let o = sng(&["cluster", "--input", "balls.bin", "--eps", "0.4", "--min-pts", "3"], d);
    assert_eq!(code(&o), 0);
    assert_eq!(field(&stdout(&o), "n"), "100");
}

#[test]
fn gen_rejects_unknown_keys() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.cfg"), "kind = balls\nn = 10\nwat = 1\n").unwrap();
    let o = sng(&["gen", "--config", "bad.cfg", "--output", "x.csv"], dir.path());
    assert_ne!(code(&o), 0);
    assert!(stderr(&o).contains("wat"), "{}", stderr(&o));
}

#[test]
fn bench_full_rate_matches_exact() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("balls.cfg"), BALLS).unwrap();
    sng(&["gen", "--config", "balls.cfg", "--output", "balls.csv"], d);
    let o = sng(
        &["bench", "--input", "balls.csv", "--label-column", "2", "--eps", "0.3,0.6", "--min-pts", "5", "--rate", "1", "--exact", "--repeats", "2"],
        d,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 4);
    for pair in rows.chunks(2) {
        assert_eq!(pair[0][0], "sng");
        assert_eq!(pair[1][0], "exact");
        // edges, ari, ami
        for col in [7, 10, 11] {
            assert_eq!(pair[0][col], pair[1][col], "column {col} in {out}");
        }
    }
}

#[test]
fn bench_tiny_eps_gives_empty_graph() {
    let dir = TempDir::new().unwrap();
    line_dataset(dir.path());
    let o = sng(&["bench", "--input", "line.csv", "--eps", "0.5", "--min-pts", "2", "--repeats", "1", "--json"], dir.path());
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["edges"], 0.0);
    assert_eq!(v[0]["ari"], serde_json::Value::Null);
}

#[test]
fn theory_window_without_noise_starts_at_zero() {
    let dir = TempDir::new().unwrap();
    let o = sng(&["theory", "--experiment", "window", "--assert"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(report_value(&stdout(&o), "lo"), vec![0.0]);
    assert!(stdout(&o).contains("\tlo\t0.000000000\t"));
}

#[test]
fn theory_window_flags_precondition() {
    let dir = TempDir::new().unwrap();
    let o = sng(&["theory", "--experiment", "window", "--eps", "3"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(report_value(&stdout(&o), "precondition_ok"), vec![0.0]);
    let o = sng(&["theory", "--experiment", "window", "--eps", "3", "--assert"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn theory_karger_complete_graph_full_rate() {
    let dir = TempDir::new().unwrap();
    let o = sng(
        &["theory", "--experiment", "karger", "--graph", "complete:20", "--s-grid", "0,1", "--trials", "100", "--json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let freq: Vec<f64> = rows
        .iter()
        .filter(|r| r["statistic"] == "connected_frequency")
        .map(|r| r["value"].as_f64().unwrap())
        .collect();
    assert_eq!(freq, vec![0.0, 1.0]);
}

#[test]
fn theory_recovery_small_grid_passes_assert() {
    let dir = TempDir::new().unwrap();
    let o = sng(
        &["theory", "--experiment", "recovery", "--n-grid", "1000,3000", "--seeds", "2", "--assert", "--output", "rec.tsv"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let tsv = fs::read_to_string(dir.path().join("rec.tsv")).unwrap();
    let ari = report_value(&tsv, "ari");
    assert_eq!(ari.len(), 2);
    assert!(ari[1] >= 0.99);
}

#[test]
fn theory_mincut_and_levelset_run() {
    let dir = TempDir::new().unwrap();
    let o = sng(&["theory", "--experiment", "mincut", "--n-grid", "200,400", "--seeds", "2"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(report_value(&stdout(&o), "cut_above_min_degree"), vec![0.0, 0.0]);
    let o = sng(
        &["theory", "--experiment", "levelset", "--n-grid", "1000,2000", "--seeds", "1", "--truth-samples", "500"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(report_value(&stdout(&o), "hausdorff").len(), 2);
}

#[test]
fn theory_rejects_wrong_scenario_kind() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("ls.cfg"), "kind = levelset\nn = 100\n").unwrap();
    let o = sng(&["theory", "--experiment", "recovery", "--config", "ls.cfg"], dir.path());
    assert_eq!(code(&o), 2);
    let o = sng(&["theory", "--experiment", "karger", "--graph", "cycle:5"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("balls.cfg"), BALLS).unwrap();
    sng(&["gen", "--config", "balls.cfg", "--output", "balls.csv"], d);
    let mut labels = Vec::new();
    let mut reports = Vec::new();
    for t in ["1", "4"] {
        let out = format!("labels-{t}");
        let o = sng(
            &["--threads", t, "cluster", "--input", "balls.csv", "--eps", "0.5", "--min-pts", "3", "--rate", "0.2", "--seed", "11", "--output", &out],
            d,
        );
        assert_eq!(code(&o), 0);
        labels.push(fs::read(d.join(&out)).unwrap());
        let rep = format!("karger-{t}");
        let o = sng(
            &["theory", "--threads", t, "--experiment", "karger", "--graph", "ball:200", "--trials", "50", "--output", &rep],
            d,
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        reports.push(fs::read(d.join(&rep)).unwrap());
    }
    assert_eq!(labels[0], labels[1]);
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn seed_env_var_matches_flag() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("balls.cfg"), BALLS).unwrap();
    sng(&["gen", "--config", "balls.cfg", "--output", "balls.csv"], d);
    let args = ["cluster", "--input", "balls.csv", "--eps", "0.5", "--min-pts", "3", "--rate", "0.1"];
    let mut flag: Vec<&str> = args.to_vec();
    flag.extend(["--seed", "77", "--output", "flag.labels"]);
    sng(&flag, d);
    let mut env: Vec<&str> = args.to_vec();
    env.extend(["--output", "env.labels"]);
    Command::new(env!("CARGO_BIN_EXE_sng"))
        .args(&env)
        .current_dir(d)
        .env("SNG_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(fs::read(d.join("flag.labels")).unwrap(), fs::read(d.join("env.labels")).unwrap());
}

const WORDS: &[&str] = &[
    "cluster", "score", "gen", "bench", "theory", "--input", "line.csv", "missing.csv", "--eps", "--min-pts",
    "--rate", "--seed", "--dist", "--pred", "--truth", "--config", "--output", "--experiment", "window",
    "karger", "--threads", "--json", "--assert", "--n", "1", "0", "-1", "1.5", "0.5", "abc", "euclidean",
    "manhattan", "--noise-policy", "drop", "exclude", "--repeats", "--label-column", "--s-grid", "--graph", "complete:4",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Any argument vector ends in success, a usage error or an I/O error,
    /// or in the assertion status when `--assert` was asked for. Never a crash.
    #[test]
    fn flag_fuzzer_respects_exit_codes(picks in prop::collection::vec(0..WORDS.len(), 0..8)) {
        let dir = TempDir::new().unwrap();
        line_dataset(dir.path());
        let args: Vec<&str> = picks.iter().map(|&i| WORDS[i]).collect();
        let o = sng(&args, dir.path());
        let c = code(&o);
        let allowed = if args.contains(&"--assert") { &[0, 1, 2, 3][..] } else { &[0, 2, 3][..] };
        prop_assert!(allowed.contains(&c), "args {:?} exited {} ({})", args, c, stderr(&o));
    }
}
