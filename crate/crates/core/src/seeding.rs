//! Deterministic seed derivation.
//!
//! Every randomized structure in the crate is driven by a single `u64` seed;
//! sub-structures get independent streams via `derive`, and hot paths use the
//! stateless `prf*` mixers directly. Everything here is pure integer
//! arithmetic, so regeneration is identical across platforms.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer: a 64-bit avalanche permutation.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(GOLDEN);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives an independent child seed from `seed` and a role/index `tag`.
#[inline]
pub fn derive(seed: u64, tag: u64) -> u64 {
    mix64(seed ^ mix64(tag))
}

/// Stateless PRF of two words under `seed`.
#[inline]
pub fn prf2(seed: u64, a: u64, b: u64) -> u64 {
    mix64(mix64(seed ^ mix64(a)) ^ b)
}

/// Counter-based RNG for bulk generation (graphs, experiment data).
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
