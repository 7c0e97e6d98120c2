//! Closed-form mean distance between two uniform points in a rectangle,
//! checked against sampling.
//!
//! cargo run --release --example rect_distance

use gapstat::analysis::{expected_rect_distance, RectSpec};
use gapstat::{Stream, UnitStream};

fn main() -> gapstat::Result<()> {
    let mut stream = Stream::new(0);
    let pairs = 200_000;
    println!("{:>6} {:>6} {:>10} {:>10}", "a", "b", "exact", "sampled");
    for (a, b) in [(1.0, 1.0), (11.0, 6.0), (6.0, 5.5), (20.0, 0.1)] {
        let exact = expected_rect_distance(RectSpec { a, b })?;
        let sampled = (0..pairs)
            .map(|_| {
                let dx = a * (stream.next_unit() - stream.next_unit());
                let dy = b * (stream.next_unit() - stream.next_unit());
                dx.hypot(dy)
            })
            .sum::<f64>()
            / pairs as f64;
        println!("{a:>6} {b:>6} {exact:>10.5} {sampled:>10.5}");
    }
    Ok(())
}
