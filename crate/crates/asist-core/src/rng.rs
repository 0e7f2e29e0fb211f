//! Deterministic stream derivation.
//!
//! Every random draw in the toolkit comes from a ChaCha8 stream whose seed is
//! derived by mixing a root seed with a domain tag and stream indices
//! (rod id, frame, pixel coordinates). Streams are therefore independent of
//! each other, of object count, and of scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; a portable, well-mixed 64-bit hash step.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mix a sequence of 64-bit words into one stream key.
pub fn mix(parts: &[u64]) -> u64 {
    let mut acc = 0x51ed_2701_9b8d_e18du64;
    for &p in parts {
        acc = splitmix64(acc ^ p);
    }
    acc
}

/// Stream keyed by `parts`; same parts always yield the same stream.
pub fn stream(parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(parts))
}

// Domain tags keep unrelated streams apart even when their indices collide.
pub const TAG_ROD: u64 = 1;
pub const TAG_ANCHOR: u64 = 2;
pub const TAG_PIXEL_NOISE: u64 = 3;
pub const TAG_SEED_SAMPLE: u64 = 4;
