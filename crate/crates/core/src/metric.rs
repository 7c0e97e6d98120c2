//! Pairwise dissimilarities.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    #[default]
    SquaredEuclidean,
    Euclidean,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::SquaredEuclidean => "squared-euclidean",
            Metric::Euclidean => "euclidean",
        }
    }

    pub fn eval(self, x: &[f64], y: &[f64]) -> Result<f64> {
        let d = squared_euclidean(x, y)?;
        Ok(match self {
            Metric::SquaredEuclidean => d,
            Metric::Euclidean => d.sqrt(),
        })
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "squared-euclidean" | "sqeuclidean" | "squared_euclidean" => {
                Ok(Metric::SquaredEuclidean)
            }
            "euclidean" => Ok(Metric::Euclidean),
            _ => Err(Error::UnsupportedMetric(s.to_owned())),
        }
    }
}

pub fn squared_euclidean(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(sq_dist(x, y))
}

#[inline]
fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Symmetric dissimilarity matrix with zero diagonal, stored as the strict
/// upper triangle in row order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    condensed: Vec<f64>,
    metric: Metric,
}

impl DistanceMatrix {
    /// Wraps a condensed upper triangle of length `n (n - 1) / 2`.
    pub fn from_condensed(n: usize, condensed: Vec<f64>, metric: Metric) -> Result<Self> {
        if condensed.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::DimensionMismatch {
                left: condensed.len(),
                right: n * n.saturating_sub(1) / 2,
            });
        }
        if let Some(v) = condensed.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "distance entries must be finite and nonnegative, found {v}"
            )));
        }
        Ok(Self {
            n,
            condensed,
            metric,
        })
    }

    /// Builds a matrix from a pair function evaluated once per unordered pair.
    pub fn from_fn(n: usize, metric: Metric, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut condensed = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                condensed.push(f(i, j));
            }
        }
        Self::from_condensed(n, condensed, metric)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn condensed(&self) -> &[f64] {
        &self.condensed
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => 0.0,
            Less => self.condensed[condensed_index(self.n, i, j)],
            Greater => self.condensed[condensed_index(self.n, j, i)],
        }
    }
}

/// Offset of pair `(i, j)`, `i < j`, in a condensed triangle of order `n`.
#[inline]
pub(crate) fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn pairwise_matrix(data: &Dataset, metric: Metric) -> DistanceMatrix {
    let n = data.n();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = data.row(i);
            (i + 1..n)
                .map(|j| {
                    let d = sq_dist(xi, data.row(j));
                    match metric {
                        Metric::SquaredEuclidean => d,
                        Metric::Euclidean => d.sqrt(),
                    }
                })
                .collect()
        })
        .collect();
    DistanceMatrix {
        n,
        condensed: rows.concat(),
        metric,
    }
}
