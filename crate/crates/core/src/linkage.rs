//! Group-average agglomerative clustering and dendrogram cuts.
//!
//! The distance between clusters `G` and `H` is the mean of `d(i, i')` over
//! `i in G`, `i' in H`. After merging `G` and `H` the distance to any other
//! cluster `K` is updated exactly as
//! `(|G| d(G, K) + |H| d(H, K)) / (|G| + |H|)`.
//!
//! Each active cluster lives in the slot of its smallest member index. When
//! several pairs share the minimum distance (within [`TIE_TOLERANCE`]) the pair
//! with the lowest smaller slot wins, then the lowest larger slot.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{condensed_index, DistanceMatrix};

/// Absolute tolerance under which two candidate merge distances are tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

/// The `n - 1` merges of an agglomeration, in merge order. Leaves are nodes
/// `0..n`, the node created by merge `t` is `n + t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeTree {
    n: usize,
    merges: Vec<Merge>,
}

impl MergeTree {
    pub fn new(n: usize, merges: Vec<Merge>) -> Result<Self> {
        if n < 1 || merges.len() != n - 1 {
            return Err(Error::InvalidConfig(format!(
                "a tree over {n} leaves needs {} merges, got {}",
                n.saturating_sub(1),
                merges.len()
            )));
        }
        let mut used = vec![false; 2 * n - 1];
        let mut sizes = vec![1usize; 2 * n - 1];
        for (t, m) in merges.iter().enumerate() {
            for child in [m.left, m.right] {
                if child >= n + t || used[child] {
                    return Err(Error::InvalidConfig(format!(
                        "merge {t} uses node {child} twice or before it exists"
                    )));
                }
                used[child] = true;
            }
            if m.size != sizes[m.left] + sizes[m.right] {
                return Err(Error::InvalidConfig(format!("merge {t} has inconsistent size")));
            }
            sizes[n + t] = m.size;
        }
        Ok(Self { n, merges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn heights(&self) -> impl Iterator<Item = f64> + '_ {
        self.merges.iter().map(|m| m.height)
    }

    pub fn node_size(&self, node: usize) -> usize {
        if node < self.n {
            1
        } else {
            self.merges[node - self.n].size
        }
    }

    /// Merge steps whose height drops below the previous one by more than
    /// `tol`. Group-average linkage is monotone in exact arithmetic; this is a
    /// diagnostic, not an invariant.
    pub fn height_inversions(&self, tol: f64) -> Vec<usize> {
        self.merges
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].height < w[0].height - tol)
            .map(|(t, _)| t + 1)
            .collect()
    }

    /// Node ids of the `k` clusters left after undoing the last `k - 1` merges.
    pub fn cut_nodes(&self, k: usize) -> Result<Vec<usize>> {
        if k == 0 || k > self.n {
            return Err(Error::InvalidK { k, n: self.n });
        }
        if self.n == 1 {
            return Ok(vec![0]);
        }
        let mut nodes = vec![2 * self.n - 2];
        for t in (self.n - k..self.n - 1).rev() {
            let id = self.n + t;
            let pos = nodes.iter().position(|&x| x == id).ok_or_else(|| {
                Error::InvalidConfig(format!("node {id} is not a root when undoing merge {t}"))
            })?;
            nodes.swap_remove(pos);
            nodes.push(self.merges[t].left);
            nodes.push(self.merges[t].right);
        }
        Ok(nodes)
    }
}

/// Assignment of `n` observations to `k` non-empty clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Validates that labels use every index in `0..k` and nothing else.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; k];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::IndexOutOfRange { index: empty, k });
        }
        Ok(Self { labels, k })
    }

    /// Relabels clusters in order of their smallest member.
    pub fn canonical(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Self { k: map.len(), labels }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn members(&self, r: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == r)
            .map(|(i, _)| i)
            .collect()
    }

    /// True when every cluster of `self` lies inside one cluster of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let mut parent = vec![usize::MAX; self.k];
        self.labels.iter().zip(&coarser.labels).all(|(&f, &c)| {
            if parent[f] == usize::MAX {
                parent[f] = c;
            }
            parent[f] == c
        })
    }
}

pub fn average_linkage(dm: &DistanceMatrix) -> MergeTree {
    let n = dm.n();
    if n < 2 {
        return MergeTree {
            n,
            merges: Vec::new(),
        };
    }
    let mut d = dm.condensed().to_vec();
    let idx = |i: usize, j: usize| {
        if i < j {
            condensed_index(n, i, j)
        } else {
            condensed_index(n, j, i)
        }
    };

    // Active slots form a sorted doubly linked list; `n` terminates it.
    let mut next: Vec<usize> = (1..=n).collect();
    let mut prev: Vec<usize> = (0..n).map(|i| i.wrapping_sub(1)).collect();
    let mut head = 0usize;
    let mut size = vec![1usize; n];
    let mut node = (0..n).collect::<Vec<_>>();
    let mut row_min = vec![f64::INFINITY; n];
    let mut nn = vec![usize::MAX; n];

    let scan_row = |d: &[f64], next: &[usize], i: usize| -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        let mut j = next[i];
        let base = condensed_index_base(n, i);
        while j < n {
            let v = d[base.wrapping_add(j)];
            if v < best.0 {
                best = (v, j);
            }
            j = next[j];
        }
        best
    };

    let mut i = head;
    while i < n {
        (row_min[i], nn[i]) = scan_row(&d, &next, i);
        i = next[i];
    }

    let mut merges = Vec::with_capacity(n - 1);
    for t in 0..n - 1 {
        let mut m = f64::INFINITY;
        let mut i = head;
        while i < n {
            m = m.min(row_min[i]);
            i = next[i];
        }
        let thr = m + TIE_TOLERANCE;
        let mut a = head;
        while row_min[a] > thr {
            a = next[a];
        }
        let mut b = next[a];
        let base = condensed_index_base(n, a);
        while d[base.wrapping_add(b)] > thr {
            b = next[b];
        }
        let height = d[base.wrapping_add(b)];

        let (sa, sb) = (size[a] as f64, size[b] as f64);
        let total = sa + sb;
        let mut k = head;
        while k < n {
            if k != a && k != b {
                let ka = idx(k, a);
                d[ka] = (sa * d[ka] + sb * d[idx(k, b)]) / total;
            }
            k = next[k];
        }

        merges.push(Merge {
            left: node[a],
            right: node[b],
            height,
            size: size[a] + size[b],
        });
        size[a] += size[b];
        node[a] = n + t;

        // Unlink b.
        let (pb, nb) = (prev[b], next[b]);
        if pb < n {
            next[pb] = nb;
        } else {
            head = nb;
        }
        if nb < n {
            prev[nb] = pb;
        }

        (row_min[a], nn[a]) = scan_row(&d, &next, a);
        let mut k = head;
        while k < a {
            if nn[k] == a || nn[k] == b {
                (row_min[k], nn[k]) = scan_row(&d, &next, k);
            } else {
                let v = d[idx(k, a)];
                if v < row_min[k] {
                    row_min[k] = v;
                    nn[k] = a;
                }
            }
            k = next[k];
        }
        let mut k = next[a];
        while k < b {
            if nn[k] == b {
                (row_min[k], nn[k]) = scan_row(&d, &next, k);
            }
            k = next[k];
        }
    }
    MergeTree { n, merges }
}

/// `condensed_index(n, i, j) == base.wrapping_add(j)` for `j > i`.
#[inline]
fn condensed_index_base(n: usize, i: usize) -> usize {
    (i * (2 * n - i - 1) / 2).wrapping_sub(i + 1)
}

pub fn cut_tree(tree: &MergeTree, k: usize) -> Result<Partition> {
    let n = tree.n();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let mut parent: Vec<usize> = (0..2 * n - 1).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (t, m) in tree.merges().iter().take(n - k).enumerate() {
        parent[m.left] = n + t;
        parent[m.right] = n + t;
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    Ok(Partition::canonical(&roots))
}
