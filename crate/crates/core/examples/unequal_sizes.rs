//! Two Gaussian clusters of increasingly unequal size: simulated selections
//! next to the closed-form size-ratio bound.
//!
//! cargo run --release --example unequal_sizes [repetitions]

use gapstat::analysis::{feasible_ratio, w1_decomposition, RatioTest, UnequalSizeScenario};
use gapstat::metric::pairwise_matrix;
use gapstat::sim::{gen_unequal, run_experiment, ExperimentSpec, Family, UNEQUAL_ROWS};
use gapstat::{average_linkage, cut_tree, Metric, Variant};

fn main() -> gapstat::Result<()> {
    let reps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let variants = vec![Variant::LogPooled, Variant::DirectPooled];

    for metric in [Metric::SquaredEuclidean, Metric::Euclidean] {
        println!("{metric}");
        for row in 1..=UNEQUAL_ROWS.len() {
            let mut spec = ExperimentSpec::new(Family::Unequal(row), reps, variants.clone(), 11);
            spec.gap.metric = metric;
            let report = run_experiment(&spec)?;
            let (n1, n2) = UNEQUAL_ROWS[row - 1];
            let log = report.frequencies(Variant::LogPooled);
            let direct = report.frequencies(Variant::DirectPooled);
            println!(
                "  N1 {n1:>4} N2 {n2:>3}  log-pooled k=1/2: {}/{}  direct-pooled k=1/2: {}/{}",
                log.count(1),
                log.count(2),
                direct.count(1),
                direct.count(2)
            );
        }
    }

    // Dispersion bookkeeping of the two-cluster cut of one equal-size draw.
    let data = gen_unequal(1, 5)?;
    let dm = pairwise_matrix(&data, Metric::SquaredEuclidean);
    let part = cut_tree(&average_linkage(&dm), 2)?;
    let dec = w1_decomposition(&part, &dm)?;
    println!("\nW1 {:.1} = W2 {:.1} + cross {:.1} + residual {:.1}", dec.w1, dec.w2, dec.cross_term, dec.residual);

    let scenario = UnequalSizeScenario { sigma: 1.0, delta: 5.0, n_total: 1530, m: 1.0, d_avg: 3.48 };
    for test in [RatioTest::Log, RatioTest::Direct] {
        let f = feasible_ratio(&scenario, test)?;
        println!("{test:?}: E(d1) {:.3}, E(d2) {:.3}, largest ratio still split: {}", f.e_d1, f.e_d2, f.max_m);
    }
    Ok(())
}
