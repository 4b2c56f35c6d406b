use std::fmt::Write as _;

use serde::Serialize;

/// One measured statistic for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub config: String,
    pub statistic: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub trials: usize,
}

/// Tabular experiment output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>, seed: u64) -> Self {
        Self {
            experiment: experiment.into(),
            seed,
            rows: Vec::new(),
        }
    }

    /// Add a single-trial value.
    pub fn push(&mut self, config: impl Into<String>, statistic: impl Into<String>, value: f64) {
        self.rows.push(ReportRow {
            config: config.into(),
            statistic: statistic.into(),
            value,
            stderr: None,
            trials: 1,
        });
    }

    /// Add the mean of `samples` with its standard error.
    pub fn push_mean(&mut self, config: impl Into<String>, statistic: impl Into<String>, samples: &[f64]) {
        let (value, stderr) = mean_stderr(samples);
        self.rows.push(ReportRow {
            config: config.into(),
            statistic: statistic.into(),
            value,
            stderr,
            trials: samples.len().max(1),
        });
    }

    pub fn find(&self, config: &str, statistic: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.config == config && r.statistic == statistic)
    }

    /// Tab-separated table with a header row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("config\tstatistic\tvalue\tstderr\ttrials\n");
        for r in &self.rows {
            let stderr = r.stderr.map(fmt_value).unwrap_or_default();
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                r.config,
                r.statistic,
                fmt_value(r.value),
                stderr,
                r.trials
            )
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.9}")
    } else {
        format!("{v}")
    }
}

/// Mean and standard error (sample standard deviation over `sqrt(len)`);
/// the error is `None` for fewer than two samples.
pub fn mean_stderr(samples: &[f64]) -> (f64, Option<f64>) {
    if samples.is_empty() {
        return (f64::NAN, None);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, None);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}
