//! Deterministic random streams.
//!
//! Every random quantity in the crate is drawn from a [`Stream`], a ChaCha8
//! generator keyed from a 64-bit seed. Child streams for parallel work units
//! (reference replicates, simulation repetitions, generator pools) are derived
//! with [`derive_seed`], so results never depend on scheduling.
//!
//! The derivation and the variate transforms below are part of the crate's
//! reproducibility contract and do not change between releases:
//!
//! * `derive_seed(seed, index) = splitmix64(seed + (index + 1) * 0x9E3779B97F4A7C15)`
//!   (wrapping arithmetic), where `splitmix64` is the SplitMix64 finalizer.
//! * `Stream::new(seed)` is `ChaCha8Rng::seed_from_u64(seed)` from `rand_chacha` 0.3.
//! * uniform on `[0, 1)`: `(next_u64 >> 11) * 2^-53`.
//! * standard normal: Box-Muller cosine branch,
//!   `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)` with `u1`, `u2` consecutive uniforms.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child of `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Source of uniform variates on `[0, 1)`.
///
/// Samplers take `&mut impl UnitStream` so tests can force exact values.
pub trait UnitStream {
    fn next_unit(&mut self) -> f64;

    fn next_normal(&mut self) -> f64 {
        let u1 = self.next_unit();
        let u2 = self.next_unit();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for work unit `index` under master `seed`.
    pub fn derived(seed: u64, index: u64) -> Self {
        Self::new(derive_seed(seed, index))
    }
}

impl UnitStream for Stream {
    fn next_unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for Stream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand_core::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Replays a fixed list of uniforms, cycling when exhausted.
#[derive(Debug, Clone)]
pub struct FixedStream {
    values: Vec<f64>,
    pos: usize,
}

impl FixedStream {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "FixedStream needs at least one value");
        Self { values, pos: 0 }
    }
}

impl UnitStream for FixedStream {
    fn next_unit(&mut self) -> f64 {
        let v = self.values[self.pos % self.values.len()];
        self.pos += 1;
        v
    }
}
