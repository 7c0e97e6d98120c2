//! Closed-form tools for reasoning about when the Gap variants succeed.
//!
//! * [`expected_rect_distance`]: mean Euclidean distance between two uniform
//!   points in an `a x b` rectangle (Santalo).
//! * [`feasible_ratio`]: for two unit-variance Gaussian clusters whose
//!   reference box is `(6 sigma + delta) x 6 sigma`, the cluster-size ratios
//!   `m = N1 / N2` for which `k = 2` is still preferred over `k = 1`.
//! * [`equal_distance_wk`]: pooled dispersion of `k` balanced clusters when all
//!   pairwise distances are equal.
//! * [`distance_concentration`]: relative spread of pairwise distances of
//!   uniform points, which shrinks as dimension grows.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::dispersion::{cluster_pair_sums, pooled_dispersion};
use crate::error::{Error, Result};
use crate::linkage::Partition;
use crate::metric::{pairwise_matrix, DistanceMatrix, Metric};
use crate::stream::UnitStream;

/// Largest size ratio scanned by [`feasible_ratio`].
pub const MAX_RATIO: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectSpec {
    pub a: f64,
    pub b: f64,
}

pub fn expected_rect_distance(rect: RectSpec) -> Result<f64> {
    let RectSpec { a, b } = rect;
    if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
        return Err(Error::NonPositiveSide { a, b });
    }
    let (a, b) = if a >= b { (a, b) } else { (b, a) };
    let d = a.hypot(b);
    let (a2, b2) = (a * a, b * b);
    let value = a * a2 / b2 + b * b2 / a2
        + d * (3.0 - a2 / b2 - b2 / a2)
        + 2.5 * (b2 / a * ((a + d) / b).ln() + a2 / b * ((b + d) / a).ln());
    Ok(value / 15.0)
}

/// Which gap definition the size-ratio inequality is written for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioTest {
    Log,
    Direct,
}

impl std::str::FromStr for RatioTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(RatioTest::Log),
            "direct" => Ok(RatioTest::Direct),
            _ => Err(Error::InvalidConfig(format!("unknown variant `{s}`, expected log or direct"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnequalSizeScenario {
    pub sigma: f64,
    /// Distance between the two cluster means.
    pub delta: f64,
    pub n_total: usize,
    /// Size ratio `N1 / N2`.
    pub m: f64,
    /// Average inter-cluster distance.
    pub d_avg: f64,
}

impl UnequalSizeScenario {
    fn validate(&self) -> Result<()> {
        let ok = self.sigma.is_finite()
            && self.sigma > 0.0
            && self.delta.is_finite()
            && self.delta >= 0.0
            && self.n_total >= 2
            && self.m.is_finite()
            && self.m >= 1.0
            && self.d_avg.is_finite()
            && self.d_avg >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidScenario(format!("{self:?}")))
        }
    }

    /// Expected distances in the full reference box and in its half.
    pub fn reference_distances(&self) -> Result<(f64, f64)> {
        self.validate()?;
        let long = 6.0 * self.sigma + self.delta;
        let short = 6.0 * self.sigma;
        Ok((
            expected_rect_distance(RectSpec { a: long, b: short })?,
            expected_rect_distance(RectSpec { a: long / 2.0, b: short })?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleRatio {
    pub e_d1: f64,
    pub e_d2: f64,
    /// Whether the inequality holds at the scenario's `m`.
    pub holds: bool,
    /// Largest integer `m` in `1..=MAX_RATIO` satisfying it, 0 if none.
    pub max_m: u32,
}

/// Left and right sides of the size-ratio inequality at `m`.
///
/// * log: `m d / (sigma (m + 1)^2) >= E(d1) / E(d2) - 1`
/// * direct: `2 m d / (m + 1)^2 >= E(d1) - E(d2)`
pub fn ratio_sides(e_d1: f64, e_d2: f64, d_avg: f64, sigma: f64, m: f64, test: RatioTest) -> (f64, f64) {
    let shape = m / ((m + 1.0) * (m + 1.0));
    match test {
        RatioTest::Log => (shape * d_avg / sigma, e_d1 / e_d2 - 1.0),
        RatioTest::Direct => (2.0 * shape * d_avg, e_d1 - e_d2),
    }
}

pub fn ratio_holds(e_d1: f64, e_d2: f64, d_avg: f64, sigma: f64, m: f64, test: RatioTest) -> bool {
    let (lhs, rhs) = ratio_sides(e_d1, e_d2, d_avg, sigma, m, test);
    lhs >= rhs
}

/// Largest integer ratio in `1..=MAX_RATIO` for which the inequality holds.
pub fn max_feasible_ratio(e_d1: f64, e_d2: f64, d_avg: f64, sigma: f64, test: RatioTest) -> u32 {
    (1..=MAX_RATIO)
        .rev()
        .find(|&m| ratio_holds(e_d1, e_d2, d_avg, sigma, m as f64, test))
        .unwrap_or(0)
}

pub fn feasible_ratio(scn: &UnequalSizeScenario, test: RatioTest) -> Result<FeasibleRatio> {
    let (e_d1, e_d2) = scn.reference_distances()?;
    Ok(FeasibleRatio {
        e_d1,
        e_d2,
        holds: ratio_holds(e_d1, e_d2, scn.d_avg, scn.sigma, scn.m, test),
        max_m: max_feasible_ratio(e_d1, e_d2, scn.d_avg, scn.sigma, test),
    })
}

/// Monte Carlo mean Euclidean distance between draws of `N(0, sigma^2 I)` and
/// `N((delta, 0), sigma^2 I)` in the plane.
pub fn estimate_cross_distance(sigma: f64, delta: f64, pairs: usize, stream: &mut impl UnitStream) -> f64 {
    let mut sum = 0.0;
    for _ in 0..pairs {
        let x = [sigma * stream.next_normal(), sigma * stream.next_normal()];
        let y = [delta + sigma * stream.next_normal(), sigma * stream.next_normal()];
        sum += (x[0] - y[0]).hypot(x[1] - y[1]);
    }
    sum / pairs as f64
}

/// `(n / 2 - k / 2) dist`: pooled dispersion of `k` balanced clusters when every
/// pairwise distance equals `dist`.
pub fn equal_distance_wk(n: usize, k: usize, dist: f64) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    Ok((n as f64 / 2.0 - k as f64 / 2.0) * dist)
}

/// `(max - min) / min` over all pairwise squared distances of the rows.
/// Zero for a single pair, infinite when two rows coincide.
pub fn spread_ratio(data: &Dataset) -> f64 {
    let dm = pairwise_matrix(data, Metric::SquaredEuclidean);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in dm.condensed() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi == lo {
        0.0
    } else {
        (hi - lo) / lo
    }
}

/// Spread ratio of `n` points drawn uniformly from `[0, 1]^p`.
pub fn distance_concentration(p: usize, n: usize, stream: &mut impl UnitStream) -> Result<f64> {
    if n < 2 || p < 1 {
        return Err(Error::EmptyDataset { rows: n, cols: p });
    }
    let values = (0..n * p).map(|_| stream.next_unit()).collect();
    Ok(spread_ratio(&Dataset::new(n, p, values)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct W1Decomposition {
    pub w1: f64,
    pub w2: f64,
    /// Mean dissimilarity over unordered cross-cluster pairs.
    pub d_delta: f64,
    /// `2 N1 N2 d_delta / n`.
    pub cross_term: f64,
    /// `w1 - w2 - cross_term`; not zero in general.
    pub residual: f64,
}

/// Splits the one-cluster dispersion of a two-cluster partition into the
/// two-cluster dispersion and a cross-cluster term.
pub fn w1_decomposition(part: &Partition, dm: &DistanceMatrix) -> Result<W1Decomposition> {
    if part.k() != 2 {
        return Err(Error::NotTwoClusters(part.k()));
    }
    let n = part.n();
    let all = Partition::new(vec![0; n])?;
    let w1 = pooled_dispersion(&all, dm)?;
    let w2 = pooled_dispersion(part, dm)?;
    let total = cluster_pair_sums(&all, dm)?[0];
    let within: f64 = cluster_pair_sums(part, dm)?.iter().sum();
    let sizes = part.sizes();
    let (n1, n2) = (sizes[0] as f64, sizes[1] as f64);
    let d_delta = (total - within) / 2.0 / (n1 * n2);
    let cross_term = 2.0 * n1 * n2 * d_delta / n as f64;
    Ok(W1Decomposition {
        w1,
        w2,
        d_delta,
        cross_term,
        residual: w1 - w2 - cross_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{FixedStream, Stream};

    fn rect(a: f64, b: f64) -> f64 {
        expected_rect_distance(RectSpec { a, b }).unwrap()
    }

    #[test]
    fn unit_square() {
        assert!((rect(1.0, 1.0) - 0.5214054).abs() < 1e-6);
    }

    #[test]
    fn side_order_irrelevant() {
        assert_eq!(rect(2.0, 1.0), rect(1.0, 2.0));
    }

    #[test]
    fn reported_constants() {
        assert!((rect(11.0, 6.0) - 4.53).abs() < 0.02);
        assert!((rect(6.0, 5.5) - 2.99).abs() < 0.02);
    }

    #[test]
    fn bad_sides() {
        assert!(matches!(
            expected_rect_distance(RectSpec { a: 0.0, b: 1.0 }),
            Err(Error::NonPositiveSide { .. })
        ));
        assert!(expected_rect_distance(RectSpec { a: -1.0, b: 1.0 }).is_err());
        assert!(expected_rect_distance(RectSpec { a: f64::NAN, b: 1.0 }).is_err());
    }

    #[test]
    fn ratio_with_reported_constants() {
        let (e1, e2, d) = (4.53, 2.99, 3.48);
        let (lhs, rhs) = ratio_sides(e1, e2, d, 1.0, 1.0, RatioTest::Log);
        assert!((lhs - 0.87).abs() < 1e-12);
        assert!((rhs - (4.53 / 2.99 - 1.0)).abs() < 1e-12);
        assert!(ratio_holds(e1, e2, d, 1.0, 1.0, RatioTest::Log));
        let (lhs, rhs) = ratio_sides(e1, e2, d, 1.0, 1.0, RatioTest::Direct);
        assert!((lhs - 1.74).abs() < 1e-12);
        assert!((rhs - 1.54).abs() < 1e-12);
        assert!(ratio_holds(e1, e2, d, 1.0, 1.0, RatioTest::Direct));
        assert!(!ratio_holds(e1, e2, d, 1.0, 16.0, RatioTest::Log));
        assert!(!ratio_holds(e1, e2, d, 1.0, 16.0, RatioTest::Direct));
        assert_eq!(max_feasible_ratio(e1, e2, d, 1.0, RatioTest::Log), 4);
    }

    #[test]
    fn coincident_clusters_never_feasible() {
        let scn = UnequalSizeScenario {
            sigma: 1.0,
            delta: 5.0,
            n_total: 1530,
            m: 1.0,
            d_avg: 0.0,
        };
        for test in [RatioTest::Log, RatioTest::Direct] {
            let f = feasible_ratio(&scn, test).unwrap();
            assert!(!f.holds);
            assert_eq!(f.max_m, 0);
        }
    }

    #[test]
    fn scenario_uses_reference_boxes() {
        let scn = UnequalSizeScenario {
            sigma: 1.0,
            delta: 5.0,
            n_total: 1530,
            m: 1.0,
            d_avg: 3.48,
        };
        let f = feasible_ratio(&scn, RatioTest::Log).unwrap();
        assert_eq!(f.e_d1, rect(11.0, 6.0));
        assert_eq!(f.e_d2, rect(5.5, 6.0));
        assert!(f.holds);
        assert_eq!(f.max_m, 4);
        assert!(feasible_ratio(&UnequalSizeScenario { m: 0.5, ..scn }, RatioTest::Log).is_err());
        assert!(feasible_ratio(&UnequalSizeScenario { sigma: 0.0, ..scn }, RatioTest::Log).is_err());
    }

    #[test]
    fn equal_distance_examples() {
        assert_eq!(equal_distance_wk(4, 1, 1.0).unwrap(), 1.5);
        assert_eq!(equal_distance_wk(4, 2, 1.0).unwrap(), 1.0);
        assert_eq!(equal_distance_wk(7, 7, 3.0).unwrap(), 0.0);
        assert!(equal_distance_wk(4, 5, 1.0).is_err());
        assert!(equal_distance_wk(4, 0, 1.0).is_err());
    }

    #[test]
    fn simplex_split_matches() {
        let dm = DistanceMatrix::from_fn(4, Metric::SquaredEuclidean, |_, _| 1.0).unwrap();
        let part = Partition::new(vec![0, 0, 1, 1]).unwrap();
        assert_eq!(pooled_dispersion(&part, &dm).unwrap(), 1.0);
    }

    #[test]
    fn concentration_forced_points() {
        let d = Dataset::from_rows(vec![vec![0.0], vec![0.5], vec![1.0]]).unwrap();
        assert_eq!(spread_ratio(&d), 3.0);
        let r = distance_concentration(1, 3, &mut FixedStream::new(vec![0.0, 0.5, 0.75])).unwrap();
        // Squared distances 0.25, 0.5625, 0.0625.
        assert!((r - (0.5625 - 0.0625) / 0.0625).abs() < 1e-12);
        assert_eq!(distance_concentration(4, 2, &mut Stream::new(1)).unwrap(), 0.0);
    }

    #[test]
    fn concentration_shrinks_with_dimension() {
        let low = distance_concentration(2, 100, &mut Stream::new(77)).unwrap();
        let high = distance_concentration(100, 100, &mut Stream::new(77)).unwrap();
        assert!(high < low, "{high} vs {low}");
    }

    #[test]
    fn decomposition_examples() {
        let dm = DistanceMatrix::from_fn(2, Metric::SquaredEuclidean, |_, _| 4.0).unwrap();
        let part = Partition::new(vec![0, 1]).unwrap();
        let w = w1_decomposition(&part, &dm).unwrap();
        assert_eq!((w.w1, w.w2, w.cross_term, w.residual), (2.0, 0.0, 4.0, -2.0));

        // Two clusters of three coincident points, c = 9 apart.
        let dm = DistanceMatrix::from_fn(6, Metric::SquaredEuclidean, |i, j| {
            if (i < 3) == (j < 3) {
                0.0
            } else {
                9.0
            }
        })
        .unwrap();
        let part = Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let w = w1_decomposition(&part, &dm).unwrap();
        assert_eq!(w.w2, 0.0);
        assert_eq!(w.d_delta, 9.0);
        assert!((w.residual - (w.w1 - w.cross_term)).abs() < 1e-12);

        let zero = DistanceMatrix::from_fn(4, Metric::SquaredEuclidean, |_, _| 0.0).unwrap();
        let w = w1_decomposition(&Partition::new(vec![0, 1, 0, 1]).unwrap(), &zero).unwrap();
        assert_eq!(w.cross_term, 0.0);
        assert_eq!(w.residual, w.w1 - w.w2);

        assert!(matches!(
            w1_decomposition(&Partition::new(vec![0, 1, 2]).unwrap(), &DistanceMatrix::from_fn(3, Metric::SquaredEuclidean, |_, _| 1.0).unwrap()),
            Err(Error::NotTwoClusters(3))
        ));
    }

    #[test]
    fn cross_distance_estimate_is_plausible() {
        // Means 5 apart with unit variance: mean Euclidean distance a bit above 5.
        let d = estimate_cross_distance(1.0, 5.0, 20_000, &mut Stream::new(3));
        assert!(d > 5.0 && d < 5.5, "{d}");
    }
}
