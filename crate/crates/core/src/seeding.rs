//! Deterministic seed derivation.
//!
//! Every random choice in the crate is drawn from a ChaCha8 stream keyed by a
//! 64-bit seed and a stream number, so results do not depend on thread count,
//! scheduling or platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; a bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` under `master`. Injective in `trial` for a fixed
/// master seed.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    mix64(master ^ mix64(trial.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

/// Seed derived for a named purpose (codebook, key, attack, ...) from a
/// parent seed.
pub fn derive_seed(parent: u64, purpose: u64) -> u64 {
    mix64(parent.wrapping_add(mix64(purpose ^ 0xd6e8_feb8_6659_fd93)))
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
