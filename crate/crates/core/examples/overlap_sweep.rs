//! Share of repetitions selecting two clusters as two Gaussian clouds move
//! apart.
//!
//! cargo run --release --example overlap_sweep [repetitions]

use gapstat::sim::{run_experiment, ExperimentSpec, Family};
use gapstat::Variant;

fn main() -> gapstat::Result<()> {
    let reps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let variants = vec![Variant::LogPooled, Variant::DirectPooled];
    println!("{:>5} {:>12} {:>14}", "delta", "log-pooled", "direct-pooled");
    for step in 1..=10 {
        let delta = step as f64 * 0.5;
        let spec = ExperimentSpec::new(Family::Overlap(delta), reps, variants.clone(), 1);
        let report = run_experiment(&spec)?;
        let pct = |v| 100.0 * report.frequencies(v).count(2) as f64 / reps as f64;
        println!("{delta:>5.1} {:>11.0}% {:>13.0}%", pct(Variant::LogPooled), pct(Variant::DirectPooled));
    }
    Ok(())
}
