//! Deterministic random streams.
//!
//! Every stochastic path in the crate draws from ChaCha8, a counter-based
//! stream cipher generator whose output is identical across platforms and
//! word sizes. Independent streams (one per ensemble realization, one per
//! Monte Carlo trial) come from hashing (master seed, index) so results do
//! not depend on execution order.

pub use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// SplitMix64 finalizer. Full-avalanche 64-bit mix.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed for stream `index` of a run keyed by `master_seed`.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    mix(master_seed ^ mix(index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

/// ChaCha8 stream for one (run, index) pair.
pub fn stream(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master_seed, index))
}
