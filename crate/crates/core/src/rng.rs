//! Seed derivation. Every random draw in the crate comes from a ChaCha stream
//! keyed by a 64-bit seed, and child seeds are derived with a SplitMix64
//! finalizer so work can be split by index in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `index` under `parent`.
pub fn derive(parent: u64, index: u64) -> u64 {
    splitmix64(splitmix64(parent) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Domain-separation tags for the independent streams of one slot.
pub mod stream {
    pub const CHANNEL: u64 = 1;
    pub const BITS: u64 = 2;
    pub const PILOTS: u64 = 3;
    pub const NOISE: u64 = 4;
    pub const SNR: u64 = 5;
    pub const DOPPLER: u64 = 6;
    pub const SHUFFLE: u64 = 7;
    pub const INIT: u64 = 8;
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
