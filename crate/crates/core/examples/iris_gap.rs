//! All four Gap variants on the bundled Iris measurements, under both
//! dissimilarities.
//!
//! cargo run --release --example iris_gap

use gapstat::{estimate_variants, Dataset, GapConfig, Metric, Variant};

fn main() -> gapstat::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/iris.csv");
    let data = Dataset::load_csv_auto(path)?;
    println!("iris: {} rows x {} features", data.n(), data.p());

    for metric in [Metric::SquaredEuclidean, Metric::Euclidean] {
        let config = GapConfig { seed: 42, metric, ..GapConfig::default() };
        let estimates = estimate_variants(&data, &config, &Variant::ALL)?;
        println!("\n{metric}");
        for e in &estimates {
            let gap: Vec<String> = e.curve.gap.iter().map(|g| format!("{g:8.3}")).collect();
            println!("  {:<16} k = {:<3} gap {}", e.curve.variant.name(), e.selection.selected_k.to_string(), gap.join(""));
        }
    }
    Ok(())
}
