//! Derived random streams: replicate b of seed s is the same sequence no
//! matter which thread computes it.
//!
//! cargo run --example seeded_streams

use gapstat::stream::derive_seed;
use gapstat::{Stream, UnitStream};
use rayon::prelude::*;

fn main() {
    let seed = 2024;
    for b in 0..4 {
        println!("replicate {b}: derived seed {:#018x}", derive_seed(seed, b));
    }
    let first = |b: u64| Stream::derived(seed, b).next_unit();
    let serial: Vec<f64> = (0..8).map(first).collect();
    let parallel: Vec<f64> = (0..8).into_par_iter().map(first).collect();
    assert_eq!(serial, parallel);
    println!("first draws: {serial:.4?}");
}
