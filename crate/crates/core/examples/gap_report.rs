//! Full gap curve, selection trace and JSON report for a synthetic
//! three-cluster dataset.
//!
//! cargo run --release --example gap_report

use gapstat::report::GapReport;
use gapstat::{estimate_clusters, Dataset, GapConfig, Stream, UnitStream, Variant};

fn main() -> gapstat::Result<()> {
    let mut stream = Stream::new(8);
    let centers = [(0.0, 0.0), (6.0, 0.0), (3.0, 5.0)];
    let rows = (0..90)
        .map(|i| {
            let (cx, cy) = centers[i % 3];
            vec![cx + 0.7 * stream.next_normal(), cy + 0.7 * stream.next_normal()]
        })
        .collect();
    let data = Dataset::from_rows(rows)?;
    let config = GapConfig { k_max: 8, b: 100, variant: Variant::LogPooled, seed: 1, ..GapConfig::default() };
    let est = estimate_clusters(&data, &config)?;

    println!("{:>2} {:>10} {:>8} {:>8}  rule", "k", "W_k", "gap", "s");
    for k in 0..est.curve.k_max() {
        let rule = est.selection.rule_trace.get(k).copied().unwrap_or(false);
        println!("{:>2} {:>10.3} {:>8.4} {:>8.4}  {rule}", k + 1, est.curve.w[k], est.curve.gap[k], est.curve.s[k]);
    }
    println!("selected k = {}\n", est.selection.selected_k);
    println!("{}", serde_json::to_string_pretty(&GapReport::from(&est))?);
    Ok(())
}
