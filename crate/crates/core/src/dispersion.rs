//! Within-cluster dispersion.
//!
//! `D_r` is the sum of `d(i, i')` over *ordered* pairs of members of cluster
//! `r`, so every unordered pair counts twice. With that convention the pooled
//! dispersion `W_k = sum_r D_r / (2 n_r)` equals the within-cluster sum of
//! squared deviations from the centroids when `d` is squared Euclidean.
//!
//! The weighted dispersion is `W'_k = sum_r 2 D_r / (n_r (n_r - 1))`, with
//! singleton clusters contributing zero.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkage::{MergeTree, Partition};
use crate::metric::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DispersionKind {
    Pooled,
    Weighted,
}

impl DispersionKind {
    /// Contribution of one cluster of `size` members with ordered pair sum `d_sum`.
    #[inline]
    pub fn cluster_term(self, d_sum: f64, size: usize) -> f64 {
        match self {
            DispersionKind::Pooled => d_sum / (2.0 * size as f64),
            DispersionKind::Weighted if size < 2 => 0.0,
            DispersionKind::Weighted => 2.0 * d_sum / (size as f64 * (size - 1) as f64),
        }
    }
}

impl fmt::Display for DispersionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DispersionKind::Pooled => "pooled",
            DispersionKind::Weighted => "weighted",
        })
    }
}

impl FromStr for DispersionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pooled" => Ok(DispersionKind::Pooled),
            "weighted" => Ok(DispersionKind::Weighted),
            _ => Err(Error::InvalidConfig(format!("unknown dispersion `{s}`"))),
        }
    }
}

/// Ordered-pair sums `D_r` for every cluster of `part`, in one pass over pairs.
pub fn cluster_pair_sums(part: &Partition, dm: &DistanceMatrix) -> Result<Vec<f64>> {
    if part.n() != dm.n() {
        return Err(Error::DimensionMismatch {
            left: part.n(),
            right: dm.n(),
        });
    }
    let labels = part.labels();
    let n = dm.n();
    let mut sums = vec![0.0; part.k()];
    let mut pos = 0;
    let cond = dm.condensed();
    for i in 0..n {
        let li = labels[i];
        for &lj in &labels[i + 1..] {
            if lj == li {
                sums[li] += 2.0 * cond[pos];
            }
            pos += 1;
        }
    }
    Ok(sums)
}

pub fn cluster_pair_sum(part: &Partition, dm: &DistanceMatrix, r: usize) -> Result<f64> {
    if r >= part.k() {
        return Err(Error::IndexOutOfRange {
            index: r,
            k: part.k(),
        });
    }
    let members = part.members(r);
    let mut s = 0.0;
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            s += dm.get(i, j);
        }
    }
    Ok(2.0 * s)
}

pub fn dispersion(part: &Partition, dm: &DistanceMatrix, kind: DispersionKind) -> Result<f64> {
    let sums = cluster_pair_sums(part, dm)?;
    Ok(sums
        .iter()
        .zip(part.sizes())
        .map(|(&d, size)| kind.cluster_term(d, size))
        .sum())
}

pub fn pooled_dispersion(part: &Partition, dm: &DistanceMatrix) -> Result<f64> {
    dispersion(part, dm, DispersionKind::Pooled)
}

pub fn weighted_dispersion(part: &Partition, dm: &DistanceMatrix) -> Result<f64> {
    dispersion(part, dm, DispersionKind::Weighted)
}

/// Ordered-pair sums for every node of the tree (leaves first).
///
/// A group-average merge height is the mean cross dissimilarity, so
/// `D(G u H) = D(G) + D(H) + 2 |G| |H| height`.
pub fn node_pair_sums(tree: &MergeTree) -> Vec<f64> {
    let n = tree.n();
    let mut sums = vec![0.0; n + tree.merges().len()];
    for (t, m) in tree.merges().iter().enumerate() {
        let cross = tree.node_size(m.left) as f64 * tree.node_size(m.right) as f64 * m.height;
        sums[n + t] = sums[m.left] + sums[m.right] + 2.0 * cross;
    }
    sums
}

/// Dispersion at `k = 1..=k_max` along a dendrogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionCurve {
    pub kind: DispersionKind,
    /// `w[k - 1]` is the dispersion of the `k`-cluster cut.
    pub w: Vec<f64>,
}

impl DispersionCurve {
    /// Evaluates the curve without rejecting zero dispersions.
    pub fn from_tree(tree: &MergeTree, k_max: usize, kind: DispersionKind) -> Result<Self> {
        Ok(Self::both_from_tree(tree, k_max)?.pick(kind))
    }

    /// Pooled and weighted curves from one pass over the tree.
    pub fn both_from_tree(tree: &MergeTree, k_max: usize) -> Result<CurvePair> {
        let n = tree.n();
        if k_max == 0 || k_max > n {
            return Err(Error::InvalidK { k: k_max, n });
        }
        let sums = node_pair_sums(tree);
        let mut pooled = Vec::with_capacity(k_max);
        let mut weighted = Vec::with_capacity(k_max);
        for k in 1..=k_max {
            let nodes = tree.cut_nodes(k)?;
            let (mut wp, mut ww) = (0.0, 0.0);
            for node in nodes {
                let size = tree.node_size(node);
                wp += DispersionKind::Pooled.cluster_term(sums[node], size);
                ww += DispersionKind::Weighted.cluster_term(sums[node], size);
            }
            pooled.push(wp);
            weighted.push(ww);
        }
        Ok(CurvePair { pooled, weighted })
    }

    pub fn k_max(&self) -> usize {
        self.w.len()
    }

    /// Dispersion at `k` (1-based).
    pub fn at(&self, k: usize) -> f64 {
        self.w[k - 1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePair {
    pub pooled: Vec<f64>,
    pub weighted: Vec<f64>,
}

impl CurvePair {
    pub fn pick(self, kind: DispersionKind) -> DispersionCurve {
        let w = match kind {
            DispersionKind::Pooled => self.pooled,
            DispersionKind::Weighted => self.weighted,
        };
        DispersionCurve { kind, w }
    }
}

/// Dispersion curve for `k = 1..=k_max`, requiring `k_max < n` and, for the
/// pooled kind, strictly positive values.
pub fn dispersion_curve(
    tree: &MergeTree,
    k_max: usize,
    kind: DispersionKind,
) -> Result<DispersionCurve> {
    if k_max == 0 || k_max >= tree.n() {
        return Err(Error::InvalidK {
            k: k_max,
            n: tree.n().saturating_sub(1),
        });
    }
    let curve = DispersionCurve::from_tree(tree, k_max, kind)?;
    if kind == DispersionKind::Pooled {
        if let Some(k) = curve.w.iter().position(|&w| w <= 0.0) {
            return Err(Error::DegenerateDispersion { k: k + 1 });
        }
    }
    Ok(curve)
}
