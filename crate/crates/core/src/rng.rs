//! Seeded random streams.
//!
//! Each generator call derives its own ChaCha stream from a user seed and a
//! purpose tag, so adding a new generator never shifts the numbers another
//! one sees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn fnv1a(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Stream for `(seed, tag)`.
pub fn stream(seed: u64, tag: &str) -> Stream {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(fnv1a(tag))))
}

/// Stream for `(seed, tag, index)`, used when one call needs many
/// independent sub-streams (one per generated point, one per trial).
pub fn substream(seed: u64, tag: &str, index: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(splitmix64(
        splitmix64(seed ^ splitmix64(fnv1a(tag))) ^ splitmix64(index.wrapping_add(1)),
    ))
}
