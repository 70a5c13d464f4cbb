//! Reproducible per-item random streams.
//!
//! Every Monte-Carlo item (trajectory, trial, setting pair) draws from its own
//! ChaCha stream keyed by `(seed, stream)`, so results do not depend on how
//! work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for item `index` within group `group`. Groups hold up to 2⁴⁰ items.
pub fn stream_id(group: u64, index: u64) -> u64 {
    debug_assert!(index < 1 << 40);
    (group << 40) | index
}
