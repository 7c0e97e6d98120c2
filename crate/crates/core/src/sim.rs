//! Simulation families and batch experiments.
//!
//! * overlap: two 50-point bivariate normal clusters, means `(0, 0)` and
//!   `(delta, delta)`, unit variances.
//! * unequal: two bivariate normal clusters, means `(0, 0)` and `(5, 0)`, with
//!   sizes from [`UNEQUAL_ROWS`]. Rows drawn from the same pool seed share
//!   prefixes of the same two point pools.
//! * degenerate: 50 points uniform on `[0, 10]^p` and 50 points uniform on
//!   `[0, 10]` in the first feature and zero elsewhere.
//!
//! Repetition `r` of an experiment uses `rep = derive_seed(master, r)`; the
//! generator draws from `Stream::derived(rep, 0)` (the unequal family uses
//! `derive_seed(rep, 0)` as its pool seed) and the reference ensembles use
//! seed `derive_seed(rep, 1)`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::gap::{estimate_variants, GapConfig, SelectedK, Variant};
use crate::stream::{derive_seed, Stream, UnitStream};

/// `(N1, N2)` for the five unequal-size rows; `N1 / N2` is 1, 2, 4, 8, 16.
pub const UNEQUAL_ROWS: [(usize, usize); 5] = [(765, 765), (1020, 510), (1224, 306), (1360, 170), (1440, 90)];

const POOL1: usize = 1440;
const POOL2: usize = 765;
const HALF: usize = 50;

/// Highest selected `k` with its own column in frequency tables.
pub const LAST_K_COLUMN: usize = 9;

pub fn gen_overlap(delta: f64, stream: &mut impl UnitStream) -> Result<Dataset> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidExperiment(format!("overlap delta must be >= 0, got {delta}")));
    }
    let mut values = Vec::with_capacity(4 * HALF);
    for i in 0..2 * HALF {
        let mean = if i < HALF { 0.0 } else { delta };
        values.push(mean + stream.next_normal());
        values.push(mean + stream.next_normal());
    }
    Dataset::new(2 * HALF, 2, values)
}

pub fn gen_unequal(row: usize, pool_seed: u64) -> Result<Dataset> {
    let &(n1, n2) = row
        .checked_sub(1)
        .and_then(|i| UNEQUAL_ROWS.get(i))
        .ok_or(Error::InvalidRow(row))?;
    let mut first = Stream::derived(pool_seed, 1);
    let mut second = Stream::derived(pool_seed, 2);
    let mut values = Vec::with_capacity(2 * (n1 + n2));
    // Pools are drawn in full so that rows share exact prefixes.
    let pool1: Vec<f64> = (0..2 * POOL1).map(|_| first.next_normal()).collect();
    let pool2: Vec<f64> = (0..POOL2)
        .flat_map(|_| [5.0 + second.next_normal(), second.next_normal()])
        .collect();
    values.extend_from_slice(&pool1[..2 * n1]);
    values.extend_from_slice(&pool2[..2 * n2]);
    Dataset::new(n1 + n2, 2, values)
}

pub fn gen_degenerate(p: usize, stream: &mut impl UnitStream) -> Result<Dataset> {
    if p < 2 {
        return Err(Error::InvalidExperiment(format!("degenerate family needs p >= 2, got {p}")));
    }
    let mut values = Vec::with_capacity(2 * HALF * p);
    for _ in 0..HALF {
        values.extend((0..p).map(|_| 10.0 * stream.next_unit()));
    }
    for _ in 0..HALF {
        values.push(10.0 * stream.next_unit());
        values.extend(std::iter::repeat_n(0.0, p - 1));
    }
    Dataset::new(2 * HALF, p, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "param", rename_all = "kebab-case")]
pub enum Family {
    Overlap(f64),
    /// Row of [`UNEQUAL_ROWS`], 1-based.
    Unequal(usize),
    /// Dimension.
    Degenerate(usize),
}

impl Family {
    /// Parses a family name and its numeric parameter.
    pub fn parse(name: &str, param: f64) -> Result<Self> {
        let family = match name {
            "overlap" => Family::Overlap(param),
            "unequal" | "degenerate" => {
                if param.fract() != 0.0 || param < 0.0 || !param.is_finite() {
                    return Err(Error::InvalidExperiment(format!(
                        "{name} needs an integer parameter, got {param}"
                    )));
                }
                if name == "unequal" {
                    Family::Unequal(param as usize)
                } else {
                    Family::Degenerate(param as usize)
                }
            }
            _ => return Err(Error::InvalidExperiment(format!("unknown family `{name}`"))),
        };
        family.validate()?;
        Ok(family)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::Overlap(d) if !(d.is_finite() && d >= 0.0) => {
                Err(Error::InvalidExperiment(format!("overlap delta must be >= 0, got {d}")))
            }
            Family::Unequal(r) if !(1..=UNEQUAL_ROWS.len()).contains(&r) => Err(Error::InvalidRow(r)),
            Family::Degenerate(p) if p < 2 => {
                Err(Error::InvalidExperiment(format!("degenerate family needs p >= 2, got {p}")))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Overlap(_) => "overlap",
            Family::Unequal(_) => "unequal",
            Family::Degenerate(_) => "degenerate",
        }
    }

    pub fn param_string(&self) -> String {
        match self {
            Family::Overlap(d) => format!("{d}"),
            Family::Unequal(r) => r.to_string(),
            Family::Degenerate(p) => p.to_string(),
        }
    }

    /// Dataset for the repetition with seed `rep_seed`.
    pub fn generate(&self, rep_seed: u64) -> Result<Dataset> {
        match *self {
            Family::Overlap(d) => gen_overlap(d, &mut Stream::derived(rep_seed, 0)),
            Family::Unequal(r) => gen_unequal(r, derive_seed(rep_seed, 0)),
            Family::Degenerate(p) => gen_degenerate(p, &mut Stream::derived(rep_seed, 0)),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.name(), self.param_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub family: Family,
    pub repetitions: usize,
    pub variants: Vec<Variant>,
    /// `k_max`, `b`, metric and sd divisor; variant and seed are overridden.
    pub gap: GapConfig,
    pub master_seed: u64,
}

impl ExperimentSpec {
    pub fn new(family: Family, repetitions: usize, variants: Vec<Variant>, master_seed: u64) -> Self {
        Self {
            family,
            repetitions,
            variants,
            gap: GapConfig::default(),
            master_seed,
        }
    }

    fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if self.repetitions == 0 {
            return Err(Error::InvalidExperiment("repetitions must be >= 1".into()));
        }
        if self.variants.is_empty() {
            return Err(Error::InvalidExperiment("no variants requested".into()));
        }
        Ok(())
    }
}

/// Outcome of one variant on one repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub variant: Variant,
    pub selected_k: SelectedK,
    /// Set when the run failed numerically (tallied as `nd`).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub failed: bool,
    /// Gap curve, absent on failure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionTrace {
    pub repetition: usize,
    pub seed: u64,
    pub outcomes: Vec<Outcome>,
}

/// Selected-k counts for one variant.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frequencies {
    /// `by_k[k - 1]` counts selections of `k` for `k <= LAST_K_COLUMN`.
    pub by_k: Vec<usize>,
    pub ge10: usize,
    pub nd: usize,
    /// Runs that failed numerically; already included in `nd`.
    pub failed: usize,
}

impl Frequencies {
    fn empty() -> Self {
        Self {
            by_k: vec![0; LAST_K_COLUMN],
            ..Self::default()
        }
    }

    pub fn record(&mut self, k: SelectedK, failed: bool) {
        match k {
            SelectedK::K(k) if (1..=LAST_K_COLUMN).contains(&k) => self.by_k[k - 1] += 1,
            SelectedK::K(_) => self.ge10 += 1,
            SelectedK::Undefined => self.nd += 1,
        }
        if failed {
            self.failed += 1;
        }
    }

    pub fn total(&self) -> usize {
        self.by_k.iter().sum::<usize>() + self.ge10 + self.nd
    }

    /// Count for `k`.
    pub fn count(&self, k: usize) -> usize {
        self.by_k.get(k.wrapping_sub(1)).copied().unwrap_or(0)
    }

    /// Most frequent bucket, ties broken toward smaller `k`; `None` means `nd`
    /// or `>= 10` dominates.
    pub fn modal_k(&self) -> Option<usize> {
        let (best_k, best) = self
            .by_k
            .iter()
            .enumerate()
            .fold((0, 0), |acc, (i, &c)| if c > acc.1 { (i + 1, c) } else { acc });
        (best > 0 && best >= self.ge10 && best >= self.nd).then_some(best_k)
    }

    fn add(&mut self, other: &Frequencies) {
        for (a, b) in self.by_k.iter_mut().zip(&other.by_k) {
            *a += b;
        }
        self.ge10 += other.ge10;
        self.nd += other.nd;
        self.failed += other.failed;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub frequencies: BTreeMap<Variant, Frequencies>,
    /// Mean gap curve per variant over non-failed repetitions.
    pub mean_gap: BTreeMap<Variant, Vec<f64>>,
    pub traces: Vec<RepetitionTrace>,
}

impl ExperimentReport {
    pub fn frequencies(&self, variant: Variant) -> &Frequencies {
        &self.frequencies[&variant]
    }
}

fn run_repetition(spec: &ExperimentSpec, r: usize) -> Result<RepetitionTrace> {
    let seed = derive_seed(spec.master_seed, r as u64);
    let data = spec.family.generate(seed)?;
    let config = GapConfig {
        seed: derive_seed(seed, 1),
        ..spec.gap.clone()
    };
    let outcomes = match estimate_variants(&data, &config, &spec.variants) {
        Ok(estimates) => estimates
            .into_iter()
            .map(|e| Outcome {
                variant: e.curve.variant,
                selected_k: e.selection.selected_k,
                failed: false,
                gap: Some(e.curve.gap),
            })
            .collect(),
        // A shared failure (e.g. a degenerate reference) is retried per
        // variant so that direct variants still report.
        Err(_) => spec
            .variants
            .iter()
            .map(|&v| match estimate_variants(&data, &config, &[v]) {
                Ok(mut e) => {
                    let e = e.remove(0);
                    Ok(Outcome {
                        variant: v,
                        selected_k: e.selection.selected_k,
                        failed: false,
                        gap: Some(e.curve.gap),
                    })
                }
                Err(Error::DegenerateDispersion { .. } | Error::NonPositiveDispersion { .. }) => Ok(Outcome {
                    variant: v,
                    selected_k: SelectedK::Undefined,
                    failed: true,
                    gap: None,
                }),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?,
    };
    Ok(RepetitionTrace {
        repetition: r,
        seed,
        outcomes,
    })
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let traces: Vec<RepetitionTrace> = (0..spec.repetitions)
        .into_par_iter()
        .map(|r| run_repetition(spec, r))
        .collect::<Result<_>>()?;

    let mut frequencies: BTreeMap<Variant, Frequencies> =
        spec.variants.iter().map(|&v| (v, Frequencies::empty())).collect();
    let mut sums: BTreeMap<Variant, (Vec<f64>, usize)> = BTreeMap::new();
    for trace in &traces {
        for o in &trace.outcomes {
            frequencies.get_mut(&o.variant).unwrap().record(o.selected_k, o.failed);
            if let Some(gap) = &o.gap {
                let entry = sums.entry(o.variant).or_insert_with(|| (vec![0.0; gap.len()], 0));
                for (s, g) in entry.0.iter_mut().zip(gap) {
                    *s += g;
                }
                entry.1 += 1;
            }
        }
    }
    let mean_gap = sums
        .into_iter()
        .map(|(v, (s, c))| (v, s.into_iter().map(|x| x / c as f64).collect()))
        .collect();
    Ok(ExperimentReport {
        spec: spec.clone(),
        frequencies,
        mean_gap,
        traces,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub family: String,
    pub param: String,
    pub variant: Variant,
    pub counts: Frequencies,
}

/// Frequency table with one row per (family, parameter, variant).
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub k_max: usize,
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub fn row(&self, family: &str, param: &str, variant: Variant) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.family == family && r.param == param && r.variant == variant)
    }

    pub fn to_csv(&self) -> String {
        let mut head = vec!["family".to_string(), "param".into(), "variant".into()];
        let buckets: Vec<String> = (1..=LAST_K_COLUMN)
            .map(|k| k.to_string())
            .chain(["ge10".to_string(), "nd".to_string()])
            .collect();
        head.extend(buckets.iter().cloned());
        head.push("total".into());
        head.extend(buckets.iter().map(|b| format!("pct_{b}")));
        let mut out = head.join(",");
        out.push('\n');
        for r in &self.rows {
            let c = &r.counts;
            let counts: Vec<usize> = c.by_k.iter().copied().chain([c.ge10, c.nd]).collect();
            let total = c.total();
            let mut cells = vec![r.family.clone(), r.param.clone(), r.variant.to_string()];
            cells.extend(counts.iter().map(usize::to_string));
            cells.push(total.to_string());
            cells.extend(
                counts
                    .iter()
                    .map(|&x| format!("{:.1}", 100.0 * x as f64 / total.max(1) as f64)),
            );
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn summarize(reports: &[ExperimentReport]) -> Result<Summary> {
    let k_max = reports
        .first()
        .map(|r| r.spec.gap.k_max)
        .ok_or_else(|| Error::HeterogeneousReports("empty report list".into()))?;
    let mut rows: Vec<SummaryRow> = Vec::new();
    for report in reports {
        if report.spec.gap.k_max != k_max {
            return Err(Error::HeterogeneousReports(format!(
                "k_max {} vs {}",
                report.spec.gap.k_max, k_max
            )));
        }
        let family = report.spec.family.name().to_string();
        let param = report.spec.family.param_string();
        for (&variant, counts) in &report.frequencies {
            match rows
                .iter_mut()
                .find(|r| r.family == family && r.param == param && r.variant == variant)
            {
                Some(row) => row.counts.add(counts),
                None => rows.push(SummaryRow {
                    family: family.clone(),
                    param: param.clone(),
                    variant,
                    counts: counts.clone(),
                }),
            }
        }
    }
    Ok(Summary { k_max, rows })
}
