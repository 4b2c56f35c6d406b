//! External clustering scores (ARI, AMI) and Hausdorff set distance.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::dataset::NOISE_LABEL;
use crate::error::{Error, Result};
use crate::graph::DistanceSpec;

/// How predicted noise points enter a contingency table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoisePolicy {
    /// All noise points form one extra predicted cluster.
    #[default]
    OwnCluster,
    /// Noise points are dropped from both labelings.
    Exclude,
}

impl std::str::FromStr for NoisePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "own-cluster" | "own" => Ok(NoisePolicy::OwnCluster),
            "exclude" => Ok(NoisePolicy::Exclude),
            other => Err(Error::param(
                "noise_policy",
                format!("unknown policy `{other}` (expected own-cluster or exclude)"),
            )),
        }
    }
}

/// `k_pred x k_true` co-occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<u64>,
    rows: usize,
    cols: usize,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    n: u64,
}

impl ContingencyTable {
    /// Build from a row-major count matrix.
    pub fn from_counts(rows: usize, cols: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != rows * cols {
            return Err(Error::Contract(format!(
                "{} counts for a {rows}x{cols} table",
                counts.len()
            )));
        }
        let mut row_sums = vec![0; rows];
        let mut col_sums = vec![0; cols];
        for i in 0..rows {
            for j in 0..cols {
                row_sums[i] += counts[i * cols + j];
                col_sums[j] += counts[i * cols + j];
            }
        }
        let n = row_sums.iter().sum();
        Ok(Self {
            counts,
            rows,
            cols,
            row_sums,
            col_sums,
            n,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.cols + j]
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    /// Nested rows, mostly for tests and debugging.
    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.cols.max(1)).map(<[u64]>::to_vec).take(self.rows).collect()
    }

    pub fn transposed(&self) -> Self {
        let mut counts = vec![0; self.counts.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                counts[j * self.rows + i] = self.get(i, j);
            }
        }
        Self {
            counts,
            rows: self.cols,
            cols: self.rows,
            row_sums: self.col_sums.clone(),
            col_sums: self.row_sums.clone(),
            n: self.n,
        }
    }

    fn nonzero(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            (0..self.cols).filter_map(move |j| {
                let c = self.get(i, j);
                (c > 0).then_some((i, j, c))
            })
        })
    }
}

/// Co-occurrence counts between a prediction (`-1` = noise) and a
/// non-negative ground truth. Rows follow ascending predicted id, with the
/// noise row last under [`NoisePolicy::OwnCluster`]; columns follow
/// ascending truth id.
pub fn contingency(pred: &[i64], truth: &[i64], policy: NoisePolicy) -> Result<ContingencyTable> {
    if pred.len() != truth.len() {
        return Err(Error::Contract(format!(
            "prediction has {} labels, truth has {}",
            pred.len(),
            truth.len()
        )));
    }
    if let Some(t) = truth.iter().find(|t| **t < 0) {
        return Err(Error::Contract(format!("negative truth label {t}")));
    }
    if let Some(p) = pred.iter().find(|p| **p < NOISE_LABEL) {
        return Err(Error::Contract(format!("invalid predicted label {p}")));
    }

    let keep = |p: i64| !(policy == NoisePolicy::Exclude && p == NOISE_LABEL);
    let index_of = |labels: &mut dyn Iterator<Item = i64>| -> BTreeMap<i64, usize> {
        let mut m: BTreeMap<i64, usize> = labels.map(|l| (l, 0)).collect();
        // noise sorts first in a BTreeMap; move it to the end
        let noise = m.remove(&NOISE_LABEL).is_some();
        let len = m.len();
        for (i, v) in m.values_mut().enumerate() {
            *v = i;
        }
        if noise {
            m.insert(NOISE_LABEL, len);
        }
        m
    };
    let pairs: Vec<(i64, i64)> = pred
        .iter()
        .zip(truth)
        .filter(|(p, _)| keep(**p))
        .map(|(p, t)| (*p, *t))
        .collect();
    let rows = index_of(&mut pairs.iter().map(|p| p.0));
    let cols = index_of(&mut pairs.iter().map(|p| p.1));
    let mut counts = vec![0u64; rows.len() * cols.len()];
    for (p, t) in &pairs {
        counts[rows[p] * cols.len() + cols[t]] += 1;
    }
    ContingencyTable::from_counts(rows.len(), cols.len(), counts)
}

/// Convenience: build the table and return `(ari, ami)`.
pub fn scores(pred: &[i64], truth: &[i64], policy: NoisePolicy) -> Result<(f64, f64)> {
    let t = contingency(pred, truth, policy)?;
    Ok((ari(&t)?, ami(&t)?))
}

fn comb2(x: u64) -> u128 {
    let x = u128::from(x);
    x * x.saturating_sub(1) / 2
}

/// Hubert–Arabie adjusted Rand index.
///
/// Evaluated as `(S T - A B) / ((A + B) T / 2 - A B)` in exact integer
/// arithmetic, where `S` sums pairs within cells, `A` and `B` within row and
/// column marginals and `T = C(n, 2)`.
pub fn ari(t: &ContingencyTable) -> Result<f64> {
    if t.n < 2 {
        return Err(Error::Contract(format!("ARI needs at least 2 points, got {}", t.n)));
    }
    let s: u128 = t.nonzero().map(|(_, _, c)| comb2(c)).sum();
    let a: u128 = t.row_sums.iter().map(|&x| comb2(x)).sum();
    let b: u128 = t.col_sums.iter().map(|&x| comb2(x)).sum();
    let total = comb2(t.n);
    let num = (s * total) as i128 - (a * b) as i128;
    // doubled to stay integral
    let den2 = ((a + b) * total) as i128 - 2 * (a * b) as i128;
    if den2 == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * num as f64 / den2 as f64)
}

/// `ln k!` for `k = 0..=n`, accumulated term by term.
fn log_factorials(n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(0.0);
    let mut acc = 0.0f64;
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

fn entropy(sums: &[u64], n: u64) -> f64 {
    let nf = n as f64;
    sums.iter()
        .filter(|&&x| x > 0)
        .map(|&x| {
            let p = x as f64 / nf;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information (nats) of the table.
pub fn mutual_information(t: &ContingencyTable) -> f64 {
    let nf = t.n as f64;
    t.nonzero()
        .map(|(i, j, c)| {
            let c = c as f64;
            c / nf * (nf * c / (t.row_sums[i] as f64 * t.col_sums[j] as f64)).ln()
        })
        .sum()
}

/// Expected mutual information under the hypergeometric model with fixed
/// marginals, summed in log space.
pub fn expected_mutual_information(t: &ContingencyTable) -> f64 {
    let n = t.n;
    if n == 0 {
        return 0.0;
    }
    let lf = log_factorials(n);
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in &t.row_sums {
        for &b in &t.col_sums {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            let base = lf[a as usize] + lf[b as usize] + lf[(n - a) as usize]
                + lf[(n - b) as usize]
                - lf[n as usize];
            for nij in lo..=hi {
                let log_p = base
                    - lf[nij as usize]
                    - lf[(a - nij) as usize]
                    - lf[(b - nij) as usize]
                    - lf[(n + nij - a - b) as usize];
                let x = nij as f64;
                emi += x / nf * (nf * x / (a as f64 * b as f64)).ln() * log_p.exp();
            }
        }
    }
    emi
}

/// Adjusted mutual information with the arithmetic-mean normaliser.
/// A vanishing denominator yields 0.
pub fn ami(t: &ContingencyTable) -> Result<f64> {
    if t.n == 0 {
        return Err(Error::Contract("AMI needs at least 1 point".into()));
    }
    let mi = mutual_information(t);
    let emi = expected_mutual_information(t);
    let h = 0.5 * (entropy(&t.row_sums, t.n) + entropy(&t.col_sums, t.n));
    let den = h - emi;
    if den.abs() <= 1e-12 * h.max(1.0) {
        return Ok(0.0);
    }
    Ok((mi - emi) / den)
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[&[f64]], b: &[&[f64]], dist: &DistanceSpec) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Contract("Hausdorff distance of an empty set".into()));
    }
    Ok(directed_hausdorff(a, b, dist).max(directed_hausdorff(b, a, dist)))
}

/// `sup_{x in from} inf_{y in to} d(x, y)`.
pub fn directed_hausdorff(from: &[&[f64]], to: &[&[f64]], dist: &DistanceSpec) -> f64 {
    from.par_iter()
        .map(|x| {
            to.iter()
                .map(|y| dist.eval(x, y))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}
