//! Deterministic random-stream derivation.
//!
//! Every random decision in the crate flows from a single `master_seed`.
//! Independent streams (one per simulation run, one for the evolution loop,
//! and so on) are derived by mixing the master seed with a small amount of
//! context: a domain tag plus positional words such as the batch size and
//! run index. This keeps parallel execution bit-identical to sequential
//! execution, because no stream ever depends on scheduling order.

use rand_chacha::ChaCha8Rng;

pub use rand::Rng;
pub use rand::SeedableRng;

/// The RNG used throughout the crate. ChaCha has a portable, stable output
/// sequence, so seeded results are reproducible across platforms.
pub type SimRng = ChaCha8Rng;

/// Domain tag for per-run simulation streams.
pub const STREAM_SIMULATION: u64 = 0x5349_4d00;
/// Domain tag for the evolutionary loop (genome generation and mutation).
pub const STREAM_EVOLUTION: u64 = 0x45564f00;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer. Full-period bijection on u64.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Collapse a master seed plus context words into one 64-bit stream seed.
pub fn derive_seed(master_seed: u64, context: &[u64]) -> u64 {
    let mut h = mix64(master_seed.wrapping_add(GOLDEN));
    for &word in context {
        h = mix64(h ^ mix64(word.wrapping_add(GOLDEN)));
    }
    h
}

/// Build the RNG for the stream identified by `(master_seed, context)`.
pub fn derive_rng(master_seed: u64, context: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master_seed, context))
}
