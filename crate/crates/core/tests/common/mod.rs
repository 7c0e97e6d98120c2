#![allow(dead_code)]

use std::path::PathBuf;
use std::time::{Duration, Instant};

use gapstat::sim::{run_experiment, ExperimentReport, ExperimentSpec, Family, Frequencies};
use gapstat::stream::{Stream, UnitStream};
use gapstat::{estimate_variants, Dataset, GapConfig, Metric, SelectedK, Variant};

pub const POOLED: [Variant; 2] = [Variant::LogPooled, Variant::DirectPooled];

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn load(name: &str) -> Dataset {
    Dataset::load_csv_auto(data_path(name)).expect("bundled dataset loads")
}

/// Prints one result line and returns the outcome.
pub fn verdict(label: &str, pass: bool, detail: &str) -> bool {
    println!("{} {label}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

/// Selected k of both pooled variants over seeds `0..seeds`.
pub fn seed_sweep(data: &Dataset, metric: Metric, seeds: u64) -> (Vec<SelectedK>, Vec<SelectedK>, Duration) {
    let start = Instant::now();
    let mut log = Vec::new();
    let mut direct = Vec::new();
    for seed in 0..seeds {
        let config = GapConfig {
            k_max: 10,
            b: 50,
            seed,
            metric,
            ..GapConfig::default()
        };
        let est = estimate_variants(data, &config, &POOLED).expect("estimate");
        log.push(est[0].selection.selected_k);
        direct.push(est[1].selection.selected_k);
    }
    (log, direct, start.elapsed())
}

pub fn hits(ks: &[SelectedK], k: usize) -> usize {
    ks.iter().filter(|s| **s == SelectedK::K(k)).count()
}

fn show(ks: &[SelectedK]) -> String {
    ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn real_data(name: &str, metric: Metric, want: usize, budget: Duration, label: &str) -> bool {
    let data = load(name);
    let (log, direct, took) = seed_sweep(&data, metric, 10);
    let pass = hits(&log, want) >= 8 && hits(&direct, want) >= 8 && took < budget;
    verdict(
        label,
        pass,
        &format!(
            "log-pooled [{}], direct-pooled [{}], {:.1}s",
            show(&log),
            show(&direct),
            took.as_secs_f64()
        ),
    )
}

pub fn experiment(family: Family, reps: usize, seed: u64, metric: Metric) -> ExperimentReport {
    let mut spec = ExperimentSpec::new(family, reps, POOLED.to_vec(), seed);
    spec.gap.metric = metric;
    run_experiment(&spec).expect("experiment runs")
}

pub fn describe(f: &Frequencies) -> String {
    format!("k1..9 {:?} ge10 {} nd {}", f.by_k, f.ge10, f.nd)
}

pub fn degenerate_high(metric: Metric, label: &str) -> bool {
    let start = Instant::now();
    let report = experiment(Family::Degenerate(100), 50, 7, metric);
    let log = report.frequencies(Variant::LogPooled);
    let direct = report.frequencies(Variant::DirectPooled);
    let took = start.elapsed();
    let pass = direct.count(2) >= 48 && log.ge10 + log.nd >= 45 && took < Duration::from_secs(600);
    verdict(
        label,
        pass,
        &format!(
            "direct-pooled {} | log-pooled {} | {:.1}s",
            describe(direct),
            describe(log),
            took.as_secs_f64()
        ),
    )
}

pub fn degenerate_low(metric: Metric, label: &str) -> bool {
    let report = experiment(Family::Degenerate(2), 50, 7, metric);
    let log = report.frequencies(Variant::LogPooled);
    let direct = report.frequencies(Variant::DirectPooled);
    let low = |f: &Frequencies| f.count(1) + f.count(2) + f.count(3);
    let pass = low(log) * 10 >= 9 * log.total()
        && low(direct) * 10 >= 9 * direct.total()
        && direct.modal_k() == Some(2);
    verdict(
        label,
        pass,
        &format!("log-pooled {} | direct-pooled {}", describe(log), describe(direct)),
    )
}

/// Modal selection per unequal-size row for (log-pooled, direct-pooled).
pub fn unequal_modes(metric: Metric) -> Vec<(Option<usize>, Option<usize>, String)> {
    (1..=5)
        .map(|row| {
            let report = experiment(Family::Unequal(row), 10, 11, metric);
            let log = report.frequencies(Variant::LogPooled);
            let direct = report.frequencies(Variant::DirectPooled);
            (
                log.modal_k(),
                direct.modal_k(),
                format!("row {row}: log {:?} direct {:?}", &log.by_k[..3], &direct.by_k[..3]),
            )
        })
        .collect()
}

pub fn unequal(metric: Metric, label: &str) -> bool {
    let modes = unequal_modes(metric);
    let expected = [
        Some((Some(2), Some(2))),
        None,
        Some((Some(2), Some(1))),
        Some((Some(1), Some(1))),
        Some((Some(1), Some(1))),
    ];
    let pass = modes
        .iter()
        .zip(expected)
        .all(|((l, d, _), want)| want.is_none_or(|w| w == (*l, *d)));
    let detail = modes.iter().map(|m| m.2.clone()).collect::<Vec<_>>().join("; ");
    verdict(label, pass, &detail)
}

pub fn overlap(metric: Metric, label: &str) -> bool {
    let fractions: Vec<(f64, f64)> = [1.0, 3.0, 5.0]
        .iter()
        .map(|&d| {
            let report = experiment(Family::Overlap(d), 50, 3, metric);
            let pct = |v| 100.0 * report.frequencies(v).count(2) as f64 / 50.0;
            (pct(Variant::LogPooled), pct(Variant::DirectPooled))
        })
        .collect();
    let log: Vec<f64> = fractions.iter().map(|f| f.0).collect();
    let drops: Vec<f64> = log.windows(2).map(|w| w[0] - w[1]).filter(|&d| d > 0.0).collect();
    let trend = drops.len() <= 1 && drops.iter().all(|&d| d <= 5.0);
    let (l5, d5) = fractions[2];
    let pass = l5 >= 95.0 && d5 >= 95.0 && trend;
    verdict(
        label,
        pass,
        &format!("% selecting 2 at delta 1/3/5: log {log:?}, direct {:?}", fractions.iter().map(|f| f.1).collect::<Vec<_>>()),
    )
}

/// Geometric and arithmetic reference means with the data dispersion at one k
/// and at k + 1.
#[derive(Debug, Clone, Copy)]
pub struct Pair {
    pub geo: (f64, f64),
    pub arith: (f64, f64),
    pub w: (f64, f64),
}

impl Pair {
    pub fn preconditions(&self) -> bool {
        let (d1, d2) = self.w;
        let (a, b) = self.geo;
        let (c, d) = self.arith;
        d2 > 0.0 && d1 > d2 && a > b && c > d && a > d1 && c > d1 && b > d2 && d > d2
    }

    pub fn log_holds(&self) -> bool {
        (self.geo.0 / self.w.0).ln() >= (self.geo.1 / self.w.1).ln()
    }

    pub fn direct_holds(&self) -> bool {
        self.arith.0 - self.w.0 >= self.arith.1 - self.w.1
    }
}

/// Gaussian blobs along the first axis with random size, count and spacing.
pub fn blobs(seed: u64) -> Dataset {
    let mut s = Stream::new(seed);
    let n = 12 + (s.next_unit() * 30.0) as usize;
    let centers = 1 + (s.next_unit() * 4.0) as usize;
    let spread = 0.5 + 4.0 * s.next_unit();
    let rows = (0..n)
        .map(|i| {
            let c = (i % centers) as f64 * spread;
            vec![c + s.next_normal(), s.next_normal()]
        })
        .collect();
    Dataset::from_rows(rows).unwrap()
}

/// Consecutive-k comparisons of one joint log/direct pooled run.
pub fn pairs(seed: u64) -> Vec<Pair> {
    let data = blobs(seed);
    let config = GapConfig { k_max: 6, b: 10, seed, ..GapConfig::default() };
    let est = estimate_variants(&data, &config, &[Variant::LogPooled, Variant::DirectPooled]).unwrap();
    let (log, direct) = (&est[0].curve, &est[1].curve);
    (0..5)
        .map(|k| Pair {
            geo: (log.e_star[k].exp(), log.e_star[k + 1].exp()),
            arith: (direct.e_star[k], direct.e_star[k + 1]),
            w: (direct.w[k], direct.w[k + 1]),
        })
        .collect()
}

