//! Reproducible random streams.
//!
//! Every sampler draws from a ChaCha8 stream selected by
//! `(base seed, stream index)`. Replication `r` of an experiment always uses
//! stream `r`, so results do not depend on how replications are scheduled
//! across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier recorded in every manifest and report.
pub const PRNG_ID: &str = "chacha8-rand_chacha-0.3:seed_from_u64(base),set_stream(replication)";

pub type StreamRng = ChaCha8Rng;

/// The generator for replication `stream` under `base_seed`.
pub fn stream_rng(base_seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(stream);
    rng
}

/// Derives an independent base seed for a named sub-experiment.
///
/// FNV-1a over the label, mixed with the parent seed through SplitMix64.
pub fn derive_seed(base_seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(base_seed ^ h)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
