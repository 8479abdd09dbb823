//! Deterministic random number generation and seed derivation.
//!
//! All randomness in this crate flows through [`ChaCha8Rng`], a counter-based
//! generator with a published algorithm, so every component is bit-reproducible
//! for a fixed seed. Stage seeds are derived from a single base seed by mixing
//! in a stage tag and an integer salt, which lets independent pipeline stages
//! (mask generation, noise, sketching, ...) be re-run in isolation.

use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Creates a generator from a 64-bit seed.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives a sub-seed from `base` for the stage named `tag` with an integer
/// `salt` (block index, mode index, ...).
///
/// FNV-1a over the tag bytes followed by a SplitMix64 finalizer; collisions
/// between distinct (tag, salt) pairs are as unlikely as 64-bit hash
/// collisions.
pub fn derive_seed(base: u64, tag: &str, salt: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in tag.as_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(base ^ h.rotate_left(17) ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
