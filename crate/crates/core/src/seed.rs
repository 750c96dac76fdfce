//! Stable seed derivation.
//!
//! Every random stream in a run is keyed by `(base_seed, rep_index, stream)`
//! through SplitMix64 finalizers, so repetitions are independent yet exactly
//! reproducible on any platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of repetition `rep` under `base`.
pub fn derive_rep_seed(base: u64, rep: u64) -> u64 {
    mix64(mix64(base) ^ rep.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Named sub-streams of one repetition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Graph = 1,
    Model = 2,
    Noise = 3,
    Policy = 4,
    Folds = 5,
}

pub fn derive_stream_seed(rep_seed: u64, stream: Stream) -> u64 {
    mix64(rep_seed ^ mix64(stream as u64))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
