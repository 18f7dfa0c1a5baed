//! Seeded randomness helpers.
//!
//! Every random quantity in the crate flows from an explicit `u64` seed
//! through a ChaCha8 stream; derived seeds come from SplitMix64 so that
//! corpora stay reproducible regardless of evaluation order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 output function.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a master seed and a counter.
pub fn split_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ stream.wrapping_mul(0xA0761D6478BD642F))
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal sample via Box–Muller.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u1: f64 = rng.gen();
        if u1 > f64::MIN_POSITIVE {
            let u2: f64 = rng.gen();
            return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    }
}

/// Complex entry with independent standard normal parts.
pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng))
}
