//! Seeded random streams.
//!
//! Every draw comes from ChaCha8 (`rand_chacha` 0.9) keyed by a 64-bit seed.
//! Trial `t` of a Monte Carlo run uses stream `t` under the master seed, so
//! each trial's matrix is fixed by `(master_seed, t)` alone and results do
//! not depend on how trials are scheduled across threads.

use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` under `master_seed`. Stream 0 equals [`seeded`].
pub fn substream(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
