//! Seeded random streams.
//!
//! Every run draws from a ChaCha8 generator seeded with a single `u64`.
//! Replicate seeds are derived by selecting ChaCha stream `index` under the
//! base key and taking its first word, so replicate `r` of a sweep can be
//! reproduced without running the others.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type RunRng = ChaCha8Rng;

pub fn run_rng(seed: u64) -> RunRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for sub-run `index` of a sweep keyed by `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index);
    rng.next_u64()
}
