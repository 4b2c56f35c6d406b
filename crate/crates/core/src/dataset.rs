//! Point sets, clusterings and their on-disk formats.
//!
//! Text datasets are comma-separated numeric rows without a header. The
//! binary layout is `"SNGD"`, a version byte, little-endian `u64` row and
//! column counts, then row-major little-endian `f64` values. Label files hold
//! one integer per line with `-1` marking noise.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"SNGD";
pub const BINARY_VERSION: u8 = 1;

/// Label written for points that belong to no cluster.
pub const NOISE_LABEL: i64 = -1;

/// An `n x dim` matrix of finite reals with optional ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<f64>,
    n: usize,
    dim: usize,
    truth: Option<Vec<u32>>,
}

impl Dataset {
    /// Build from a row-major buffer.
    pub fn new(points: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Contract("dataset dimension must be at least 1".into()));
        }
        if points.is_empty() {
            return Err(Error::EmptyInput("dataset has no rows".into()));
        }
        if !points.len().is_multiple_of(dim) {
            return Err(Error::Contract(format!(
                "buffer of {} values is not a multiple of dimension {dim}",
                points.len()
            )));
        }
        if let Some(pos) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::Contract(format!(
                "non-finite value at row {}, column {}",
                pos / dim,
                pos % dim
            )));
        }
        let n = points.len() / dim;
        Ok(Self {
            points,
            n,
            dim,
            truth: None,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut buf = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::Contract(format!(
                    "row {i} has {} columns, expected {dim}",
                    r.len()
                )));
            }
            buf.extend_from_slice(r);
        }
        Self::new(buf, dim)
    }

    /// Attach ground-truth labels; the length must equal the row count.
    pub fn with_truth(mut self, truth: Vec<u32>) -> Result<Self> {
        if truth.len() != self.n {
            return Err(Error::Contract(format!(
                "{} truth labels for {} points",
                truth.len(),
                self.n
            )));
        }
        self.truth = Some(truth);
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.dim)
    }

    pub fn values(&self) -> &[f64] {
        &self.points
    }

    pub fn truth(&self) -> Option<&[u32]> {
        self.truth.as_deref()
    }

    /// Subset of rows (labels follow) in the given index order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut buf = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            buf.extend_from_slice(self.row(i));
        }
        let mut out = Self::new(buf, self.dim)?;
        if let Some(t) = &self.truth {
            out.truth = Some(indices.iter().map(|&i| t[i]).collect());
        }
        Ok(out)
    }
}

/// Role a point plays in a clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Core,
    Border,
    Noise,
}

/// Per-point cluster assignment (`None` is noise) with role flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    assignment: Vec<Option<u32>>,
    roles: Vec<Role>,
    k: usize,
}

impl Clustering {
    /// Validates that clustered points are exactly the Core/Border ones and
    /// that ids cover `0..k` without gaps.
    pub fn new(assignment: Vec<Option<u32>>, roles: Vec<Role>) -> Result<Self> {
        if assignment.len() != roles.len() {
            return Err(Error::Contract(format!(
                "{} assignments but {} roles",
                assignment.len(),
                roles.len()
            )));
        }
        for (i, (a, r)) in assignment.iter().zip(&roles).enumerate() {
            match (a, r) {
                (Some(_), Role::Noise) | (None, Role::Core | Role::Border) => {
                    return Err(Error::Contract(format!(
                        "point {i}: role {r:?} inconsistent with assignment {a:?}"
                    )))
                }
                _ => {}
            }
        }
        let k = assignment
            .iter()
            .flatten()
            .map(|&c| c as usize + 1)
            .max()
            .unwrap_or(0);
        let mut used = vec![false; k];
        for &c in assignment.iter().flatten() {
            used[c as usize] = true;
        }
        if let Some(gap) = used.iter().position(|u| !u) {
            return Err(Error::Contract(format!("cluster id {gap} is unused")));
        }
        Ok(Self {
            assignment,
            roles,
            k,
        })
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Number of clusters.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[Option<u32>] {
        &self.assignment
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn noise_count(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_none()).count()
    }

    pub fn core_count(&self) -> usize {
        self.roles.iter().filter(|r| **r == Role::Core).count()
    }

    /// Labels with noise mapped to `-1`.
    pub fn labels(&self) -> Vec<i64> {
        self.assignment
            .iter()
            .map(|a| a.map_or(NOISE_LABEL, i64::from))
            .collect()
    }

    /// Indices of all clustered (non-noise) points.
    pub fn clustered_indices(&self) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.map(|_| i))
            .collect()
    }
}

/// Options for [`load_csv`].
#[derive(Debug, Clone, Copy, Default)]
pub struct CsvOptions {
    /// Column holding class labels; removed from the features.
    pub label_column: Option<usize>,
    /// Skip the first line.
    pub header: bool,
}

pub fn load_csv(path: impl AsRef<Path>, opts: CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, opts)
}

/// Parse CSV text. Blank lines are ignored; line numbers in errors are
/// 1-based and count every physical line.
pub fn parse_csv(text: &str, opts: CsvOptions) -> Result<Dataset> {
    let mut values = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    let mut width: Option<usize> = None;
    let skip = usize::from(opts.header);

    for (idx, line) in text.lines().enumerate().skip(skip) {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        match width {
            None => {
                if let Some(lc) = opts.label_column {
                    if lc >= cells.len() {
                        return Err(Error::Parse {
                            line: lineno,
                            reason: format!(
                                "label column {lc} out of range for {} columns",
                                cells.len()
                            ),
                        });
                    }
                    if cells.len() == 1 {
                        return Err(Error::Parse {
                            line: lineno,
                            reason: "no feature columns besides the label".into(),
                        });
                    }
                }
                width = Some(cells.len());
            }
            Some(w) if w != cells.len() => {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("expected {w} columns, found {}", cells.len()),
                });
            }
            Some(_) => {}
        }
        for (c, cell) in cells.iter().enumerate() {
            if Some(c) == opts.label_column {
                raw_labels.push((*cell).to_owned());
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                line: lineno,
                reason: format!("column {c}: `{cell}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("column {c}: non-finite value `{cell}`"),
                });
            }
            values.push(v);
        }
    }

    let Some(width) = width else {
        return Err(Error::EmptyInput("no data rows".into()));
    };
    let dim = width - usize::from(opts.label_column.is_some());
    let ds = Dataset::new(values, dim)?;
    if opts.label_column.is_some() {
        ds.with_truth(map_first_appearance(&raw_labels))
    } else {
        Ok(ds)
    }
}

/// Map arbitrary label strings to `0..c` in order of first appearance.
pub fn map_first_appearance<S: AsRef<str>>(raw: &[S]) -> Vec<u32> {
    let mut seen: HashMap<&str, u32> = HashMap::new();
    raw.iter()
        .map(|s| {
            let next = seen.len() as u32;
            *seen.entry(s.as_ref()).or_insert(next)
        })
        .collect()
}

/// Write features (and truth labels as a trailing column, when present).
/// Floats use the shortest representation that parses back bit-exactly.
pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, dataset_to_csv(ds)).map_err(|e| Error::io(path, e))
}

pub fn dataset_to_csv(ds: &Dataset) -> String {
    let mut out = String::with_capacity(ds.n() * ds.dim() * 12);
    for (i, row) in ds.rows().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v:?}").unwrap();
        }
        if let Some(t) = ds.truth() {
            write!(out, ",{}", t[i]).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn save_binary(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_binary(ds)).map_err(|e| Error::io(path, e))
}

pub fn load_binary(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_binary(&bytes)
}

pub fn encode_binary(ds: &Dataset) -> Vec<u8> {
    let mut out = Vec::with_capacity(21 + ds.values().len() * 8);
    out.extend_from_slice(BINARY_MAGIC);
    out.push(BINARY_VERSION);
    out.extend_from_slice(&(ds.n() as u64).to_le_bytes());
    out.extend_from_slice(&(ds.dim() as u64).to_le_bytes());
    for v in ds.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<Dataset> {
    const HEADER: usize = 4 + 1 + 8 + 8;
    if bytes.is_empty() {
        return Err(Error::EmptyInput("binary dataset is empty".into()));
    }
    if bytes.len() < HEADER || &bytes[..4] != BINARY_MAGIC {
        return Err(Error::Parse {
            line: 0,
            reason: "missing SNGD header".into(),
        });
    }
    if bytes[4] != BINARY_VERSION {
        return Err(Error::Parse {
            line: 0,
            reason: format!("unsupported binary version {}", bytes[4]),
        });
    }
    let n = u64::from_le_bytes(bytes[5..13].try_into().unwrap()) as usize;
    let dim = u64::from_le_bytes(bytes[13..21].try_into().unwrap()) as usize;
    let expected = n
        .checked_mul(dim)
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| c.checked_add(HEADER));
    if expected != Some(bytes.len()) {
        return Err(Error::Parse {
            line: 0,
            reason: format!("payload length does not match n={n}, D={dim}"),
        });
    }
    let values = bytes[HEADER..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Dataset::new(values, dim)
}

/// One label per line: the cluster id, or `-1` for noise.
pub fn save_clustering(c: &Clustering, path: impl AsRef<Path>) -> Result<()> {
    save_labels(&c.labels(), path)
}

pub fn save_labels(labels: &[i64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, labels_to_text(labels)).map_err(|e| Error::io(path, e))
}

pub fn labels_to_text(labels: &[i64]) -> String {
    let mut out = String::with_capacity(labels.len() * 3);
    for l in labels {
        writeln!(out, "{l}").unwrap();
    }
    out
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<i64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text)
}

pub fn parse_labels(text: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: i64 = line.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            reason: format!("`{line}` is not an integer label"),
        })?;
        if v < NOISE_LABEL {
            return Err(Error::Parse {
                line: idx + 1,
                reason: format!("label {v} below the noise sentinel"),
            });
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("label file has no entries".into()));
    }
    Ok(out)
}
