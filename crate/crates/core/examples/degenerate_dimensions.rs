//! One full-dimensional uniform cluster against one collapsed onto a line,
//! in 2 and 100 dimensions, plus how pairwise distances concentrate with p.
//!
//! cargo run --release --example degenerate_dimensions [repetitions]

use gapstat::analysis::distance_concentration;
use gapstat::sim::{run_experiment, summarize, ExperimentSpec, Family};
use gapstat::{Stream, Variant};

fn main() -> gapstat::Result<()> {
    let reps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let variants = vec![Variant::LogPooled, Variant::DirectPooled];
    let reports = [2, 100]
        .into_iter()
        .map(|p| run_experiment(&ExperimentSpec::new(Family::Degenerate(p), reps, variants.clone(), 7)))
        .collect::<gapstat::Result<Vec<_>>>()?;
    print!("{}", summarize(&reports)?.to_csv());

    println!("\n{:>5} {:>14}", "p", "(max-min)/min");
    let mut stream = Stream::new(3);
    for p in [2, 10, 100, 1000] {
        println!("{p:>5} {:>14.3}", distance_concentration(p, 100, &mut stream)?);
    }
    Ok(())
}
