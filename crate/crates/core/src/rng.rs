//! Seed plumbing. Every random stream in the crate is a `ChaCha8Rng` whose
//! seed is derived from a master seed and a path of labels, so results do not
//! depend on thread scheduling or evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives an independent child seed from `seed` and a label.
pub fn fork(seed: u64, label: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(label.wrapping_mul(0xD6E8_FEB8_6659_FD93)))
}

pub fn rng_from(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
