//! Seeded random streams.
//!
//! Every random draw in the crate goes through a ChaCha stream derived from
//! `(master seed, stream index)`, so results do not depend on which worker
//! happens to evaluate which ensemble member.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` under `master`.
pub fn stream(master: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Derive a child seed, useful when an API takes a plain integer seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    use rand::RngCore;
    stream(master, index.wrapping_add(1 << 32)).next_u64()
}
