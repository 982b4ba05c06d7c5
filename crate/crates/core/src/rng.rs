//! Seeded random streams.
//!
//! Every random draw in the crate comes from [`SeededRng`], which is ChaCha
//! with 8 rounds seeded through `SeedableRng::seed_from_u64`. Index sampling
//! always goes through 64-bit integers so that the stream is identical on 32-
//! and 64-bit targets.

use rand::{Rng, SeedableRng};

pub type SeededRng = rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Uniform index in `0..n`. `n` must be non-zero.
#[inline]
pub fn index<R: Rng + ?Sized>(rng: &mut R, n: usize) -> usize {
    debug_assert!(n > 0);
    rng.gen_range(0..n as u64) as usize
}

/// Uniform real in `[0, 1)` with 53 bits of precision.
#[inline]
pub fn unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen::<f64>()
}

/// SplitMix64 finalizer, used to derive independent seeds from a base seed
/// and a list of labels.
pub fn mix_seed(base: u64, labels: &[u64]) -> u64 {
    let mut state = base;
    for &label in labels {
        state = splitmix(state ^ splitmix(label.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    state
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
