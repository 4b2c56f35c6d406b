use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// User-supplied dissimilarity over two rows of the declared dimension.
pub type DistanceFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// Pairwise dissimilarity used to threshold the neighborhood graph.
#[derive(Clone, Default)]
pub enum DistanceSpec {
    #[default]
    Euclidean,
    Manhattan,
    /// `1 - cos(a, b)`; zero vectors are rejected at validation.
    Cosine,
    /// Arbitrary symmetric, non-negative function with `d(x, x) = 0`.
    Precomputed { dim: usize, func: DistanceFn },
}

impl DistanceSpec {
    pub fn precomputed<F>(dim: usize, func: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        DistanceSpec::Precomputed {
            dim,
            func: Arc::new(func),
        }
    }

    #[inline]
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            DistanceSpec::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            DistanceSpec::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            DistanceSpec::Cosine => {
                let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
                for (x, y) in a.iter().zip(b) {
                    dot += x * y;
                    na += x * x;
                    nb += y * y;
                }
                (1.0 - dot / (na.sqrt() * nb.sqrt())).max(0.0)
            }
            DistanceSpec::Precomputed { func, .. } => func(a, b),
        }
    }

    /// Check that this distance can be evaluated on every row of `data`.
    pub fn validate(&self, data: &Dataset) -> Result<()> {
        match self {
            DistanceSpec::Precomputed { dim, .. } if *dim != data.dim() => Err(Error::Contract(
                format!(
                    "distance callback expects dimension {dim}, dataset has {}",
                    data.dim()
                ),
            )),
            DistanceSpec::Cosine => match data.rows().position(|r| r.iter().all(|v| *v == 0.0)) {
                Some(i) => Err(Error::Contract(format!(
                    "cosine distance undefined for zero vector at row {i}"
                ))),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistanceSpec::Euclidean => "euclidean",
            DistanceSpec::Manhattan => "manhattan",
            DistanceSpec::Cosine => "cosine",
            DistanceSpec::Precomputed { .. } => "precomputed",
        }
    }
}

impl fmt::Debug for DistanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceSpec::Precomputed { dim, .. } => write!(f, "Precomputed(dim={dim})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for DistanceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Ok(DistanceSpec::Euclidean),
            "manhattan" | "l1" => Ok(DistanceSpec::Manhattan),
            "cosine" => Ok(DistanceSpec::Cosine),
            other => Err(Error::param(
                "dist",
                format!("unknown distance `{other}` (expected euclidean, manhattan or cosine)"),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_values() {
        let a = [0.0, 0.0];
        let b = [3.0, 4.0];
        assert_eq!(DistanceSpec::Euclidean.eval(&a, &b), 5.0);
        assert_eq!(DistanceSpec::Manhattan.eval(&a, &b), 7.0);
        let c = DistanceSpec::Cosine;
        assert_eq!(c.eval(&[1.0, 0.0], &[0.0, 2.0]), 1.0);
        assert!(c.eval(&[1.0, 1.0], &[2.0, 2.0]) < 1e-12);
    }

    #[test]
    fn cosine_rejects_zero_rows() {
        let ds = Dataset::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
        assert!(DistanceSpec::Cosine.validate(&ds).is_err());
        assert!(DistanceSpec::Euclidean.validate(&ds).is_ok());
    }

    #[test]
    fn callback_dimension_checked() {
        let ds = Dataset::from_rows(&[[1.0, 0.0]]).unwrap();
        let d = DistanceSpec::precomputed(3, |_, _| 0.0);
        assert!(matches!(d.validate(&ds), Err(Error::Contract(_))));
    }

    #[test]
    fn parses_names() {
        assert!(matches!("L2".parse(), Ok(DistanceSpec::Euclidean)));
        assert!("hamming".parse::<DistanceSpec>().is_err());
    }
}
