//! Gap curves, reference ensembles and the smallest-k selection rule.
//!
//! For each `k` the data dispersion `W_k` is compared with `B` dispersions
//! `W*_kb` of uniform reference datasets drawn from the bounding box of the
//! data and clustered the same way:
//!
//! * log variants: `gap(k) = mean_b log W*_kb - log W_k`
//! * direct variants: `gap(k) = mean_b W*_kb - W_k`
//!
//! with simulation error `s_k = sqrt(1 + 1/B) sd_k`, where `sd_k` is the
//! standard deviation of the same per-replicate quantity (log or raw). The
//! estimate is the smallest `k` with `gap(k) >= gap(k + 1) - s_{k+1}`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FeatureRanges};
use crate::dispersion::{dispersion_curve, CurvePair, DispersionCurve, DispersionKind};
use crate::error::{Error, Result};
use crate::linkage::{average_linkage, cut_tree, MergeTree, Partition};
use crate::metric::{pairwise_matrix, Metric};
use crate::stream::{Stream, UnitStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    LogPooled,
    DirectPooled,
    LogWeighted,
    DirectWeighted,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::LogPooled,
        Variant::DirectPooled,
        Variant::LogWeighted,
        Variant::DirectWeighted,
    ];

    pub fn is_log(self) -> bool {
        matches!(self, Variant::LogPooled | Variant::LogWeighted)
    }

    pub fn kind(self) -> DispersionKind {
        match self {
            Variant::LogPooled | Variant::DirectPooled => DispersionKind::Pooled,
            Variant::LogWeighted | Variant::DirectWeighted => DispersionKind::Weighted,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::LogPooled => "log-pooled",
            Variant::DirectPooled => "direct-pooled",
            Variant::LogWeighted => "log-weighted",
            Variant::DirectWeighted => "direct-weighted",
        }
    }

    fn transform(self, w: f64) -> f64 {
        if self.is_log() {
            w.ln()
        } else {
            w
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown variant `{s}`")))
    }
}

/// Divisor of the standard deviation behind `s_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdDivisor {
    /// Divide by `B`.
    #[default]
    Population,
    /// Divide by `B - 1`.
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapConfig {
    pub k_max: usize,
    /// Number of reference replicates.
    pub b: usize,
    pub variant: Variant,
    pub seed: u64,
    pub metric: Metric,
    pub sd_divisor: SdDivisor,
}

impl Default for GapConfig {
    fn default() -> Self {
        Self {
            k_max: 10,
            b: 50,
            variant: Variant::LogPooled,
            seed: 0,
            metric: Metric::SquaredEuclidean,
            sd_divisor: SdDivisor::Population,
        }
    }
}

impl GapConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k_max < 2 {
            return Err(Error::InvalidConfig(format!("k_max must be >= 2, got {}", self.k_max)));
        }
        if self.b < 2 {
            return Err(Error::InvalidConfig(format!("b must be >= 2, got {}", self.b)));
        }
        if self.k_max >= n {
            return Err(Error::InvalidConfig(format!(
                "k_max = {} must be smaller than n = {n}",
                self.k_max
            )));
        }
        Ok(())
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        Self {
            variant,
            ..self.clone()
        }
    }
}

/// `n` rows drawn independently and uniformly from the box `ranges`.
///
/// Every coordinate consumes one uniform, zero-width features included, so
/// the variates line up across datasets of equal shape.
pub fn sample_reference(ranges: &FeatureRanges, n: usize, stream: &mut impl UnitStream) -> Result<Dataset> {
    let p = ranges.dim();
    let mut values = Vec::with_capacity(n * p);
    for _ in 0..n {
        for j in 0..p {
            let u = stream.next_unit();
            values.push(ranges.mins[j] + u * ranges.width(j));
        }
    }
    Dataset::new(n, p, values)
}

/// Dispersions of `B` reference replicates: `w_star[b][k - 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceEnsemble {
    pub kind: DispersionKind,
    pub w_star: Vec<Vec<f64>>,
}

impl ReferenceEnsemble {
    pub fn b(&self) -> usize {
        self.w_star.len()
    }

    pub fn k_max(&self) -> usize {
        self.w_star.first().map_or(0, Vec::len)
    }

    /// The `B` reference values at `k` (1-based).
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.w_star.iter().map(|row| row[k - 1]).collect()
    }
}

/// Pooled and weighted reference curves of every replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePair {
    pub pooled: ReferenceEnsemble,
    pub weighted: ReferenceEnsemble,
}

impl ReferencePair {
    pub fn get(&self, kind: DispersionKind) -> &ReferenceEnsemble {
        match kind {
            DispersionKind::Pooled => &self.pooled,
            DispersionKind::Weighted => &self.weighted,
        }
    }
}

/// Clusters `B` uniform references with any tree builder. Replicate `b` draws
/// from `Stream::derived(seed, b)`; replicates run in parallel and are
/// collected in index order.
pub fn reference_pair_with<F>(data: &Dataset, config: &GapConfig, build: F) -> Result<ReferencePair>
where
    F: Fn(&crate::metric::DistanceMatrix) -> MergeTree + Sync,
{
    config.validate(data.n())?;
    let ranges = data.feature_ranges();
    let curves: Vec<CurvePair> = (0..config.b)
        .into_par_iter()
        .map(|b| {
            let mut stream = Stream::derived(config.seed, b as u64);
            let reference = sample_reference(&ranges, data.n(), &mut stream)?;
            let tree = build(&pairwise_matrix(&reference, config.metric));
            DispersionCurve::both_from_tree(&tree, config.k_max)
        })
        .collect::<Result<_>>()?;
    let (pooled, weighted) = curves.into_iter().map(|c| (c.pooled, c.weighted)).unzip();
    Ok(ReferencePair {
        pooled: ReferenceEnsemble {
            kind: DispersionKind::Pooled,
            w_star: pooled,
        },
        weighted: ReferenceEnsemble {
            kind: DispersionKind::Weighted,
            w_star: weighted,
        },
    })
}

pub fn reference_ensemble(data: &Dataset, config: &GapConfig) -> Result<ReferenceEnsemble> {
    let pair = reference_pair_with(data, config, average_linkage)?;
    let ens = pair.get(config.variant.kind()).clone();
    if config.variant.is_log() {
        check_positive(&ens)?;
    }
    Ok(ens)
}

fn check_positive(ens: &ReferenceEnsemble) -> Result<()> {
    for row in &ens.w_star {
        if let Some(k) = row.iter().position(|&w| w <= 0.0) {
            return Err(Error::DegenerateDispersion { k: k + 1 });
        }
    }
    Ok(())
}

/// `sqrt(1 + 1/B)` times the standard deviation of `values`.
pub fn simulation_error(values: &[f64], divisor: SdDivisor) -> f64 {
    let b = values.len() as f64;
    let mean = values.iter().sum::<f64>() / b;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let denom = match divisor {
        SdDivisor::Population => b,
        SdDivisor::Sample => b - 1.0,
    };
    (1.0 + 1.0 / b).sqrt() * (ss / denom).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapCurve {
    pub variant: Variant,
    /// Data dispersion, `w[k - 1]`.
    pub w: Vec<f64>,
    /// Reference expectation of `log W*` (log variants) or `W*`.
    pub e_star: Vec<f64>,
    pub gap: Vec<f64>,
    pub s: Vec<f64>,
}

impl GapCurve {
    pub fn k_max(&self) -> usize {
        self.gap.len()
    }
}

pub fn gap_curve(
    w: &DispersionCurve,
    ens: &ReferenceEnsemble,
    variant: Variant,
    divisor: SdDivisor,
) -> Result<GapCurve> {
    let k_max = w.k_max();
    if ens.k_max() != k_max {
        return Err(Error::DimensionMismatch {
            left: ens.k_max(),
            right: k_max,
        });
    }
    if ens.b() < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 replicates, got {}", ens.b())));
    }
    if variant.is_log() {
        if let Some(k) = w.w.iter().position(|&v| v <= 0.0) {
            return Err(Error::NonPositiveDispersion {
                k: k + 1,
                value: w.w[k],
            });
        }
        check_positive(ens)?;
    }
    let mut e_star = Vec::with_capacity(k_max);
    let mut gap = Vec::with_capacity(k_max);
    let mut s = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let column: Vec<f64> = ens.column(k).into_iter().map(|v| variant.transform(v)).collect();
        let e = column.iter().sum::<f64>() / column.len() as f64;
        e_star.push(e);
        gap.push(e - variant.transform(w.at(k)));
        s.push(simulation_error(&column, divisor));
    }
    Ok(GapCurve {
        variant,
        w: w.w.clone(),
        e_star,
        gap,
        s,
    })
}

/// Selected number of clusters, or undefined when no `k < k_max` qualifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectedK {
    K(usize),
    Undefined,
}

impl SelectedK {
    pub fn as_k(self) -> Option<usize> {
        match self {
            SelectedK::K(k) => Some(k),
            SelectedK::Undefined => None,
        }
    }
}

impl fmt::Display for SelectedK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectedK::K(k) => write!(f, "{k}"),
            SelectedK::Undefined => f.write_str("nd"),
        }
    }
}

impl Serialize for SelectedK {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SelectedK::K(k) => s.serialize_u64(*k as u64),
            SelectedK::Undefined => s.serialize_str("nd"),
        }
    }
}

impl<'de> Deserialize<'de> for SelectedK {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            K(usize),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::K(k) => Ok(SelectedK::K(k)),
            Raw::S(s) if s == "nd" => Ok(SelectedK::Undefined),
            Raw::S(s) => Err(serde::de::Error::custom(format!("expected integer or \"nd\", got {s}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected_k: SelectedK,
    /// `rule_trace[k - 1]` holds `gap(k) >= gap(k + 1) - s_{k+1}` for `k < k_max`.
    pub rule_trace: Vec<bool>,
}

pub fn select_k(curve: &GapCurve) -> SelectionResult {
    let rule_trace: Vec<bool> = (0..curve.k_max().saturating_sub(1))
        .map(|i| curve.gap[i] >= curve.gap[i + 1] - curve.s[i + 1])
        .collect();
    let selected_k = rule_trace
        .iter()
        .position(|&ok| ok)
        .map_or(SelectedK::Undefined, |i| SelectedK::K(i + 1));
    SelectionResult {
        selected_k,
        rule_trace,
    }
}

/// Everything computed by [`estimate_clusters`].
#[derive(Debug, Clone)]
pub struct Estimate {
    pub config: GapConfig,
    pub n: usize,
    pub p: usize,
    pub curve: GapCurve,
    pub selection: SelectionResult,
    pub partition: Option<Partition>,
    pub tree: MergeTree,
}

/// Distance matrix, average linkage, dispersion curve, reference ensemble,
/// gap curve and selection for one variant.
pub fn estimate_clusters(data: &Dataset, config: &GapConfig) -> Result<Estimate> {
    let mut out = estimate_variants(data, config, &[config.variant])?;
    Ok(out.remove(0))
}

/// Runs several variants sharing the data tree and the reference replicates.
pub fn estimate_variants(data: &Dataset, config: &GapConfig, variants: &[Variant]) -> Result<Vec<Estimate>> {
    config.validate(data.n())?;
    let dm = pairwise_matrix(data, config.metric);
    let tree = average_linkage(&dm);
    let refs = reference_pair_with(data, config, average_linkage)?;
    variants
        .iter()
        .map(|&variant| {
            let w = if variant.is_log() {
                dispersion_curve(&tree, config.k_max, variant.kind())?
            } else {
                DispersionCurve::from_tree(&tree, config.k_max, variant.kind())?
            };
            let curve = gap_curve(&w, refs.get(variant.kind()), variant, config.sd_divisor)?;
            let selection = select_k(&curve);
            let partition = match selection.selected_k {
                SelectedK::K(k) => Some(cut_tree(&tree, k)?),
                SelectedK::Undefined => None,
            };
            Ok(Estimate {
                config: config.with_variant(variant),
                n: data.n(),
                p: data.p(),
                curve,
                selection,
                partition,
                tree: tree.clone(),
            })
        })
        .collect()
}
