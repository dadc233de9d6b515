//! Seeded random number generation.
//!
//! Every stochastic routine takes a `u64` seed and builds a
//! [`Xoshiro256PlusPlus`] from it through SplitMix64 (the expansion used by
//! `SeedableRng::seed_from_u64` in `rand_xoshiro`). Replica seeds are derived
//! from a master seed with [`mix`], so a replica's stream depends only on
//! `(master_seed, replica_index)` and never on scheduling.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// Generator used throughout the crate.
pub type SimRng = Xoshiro256PlusPlus;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function (Steele, Lea and Flood finalizer).
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for replica `index` of an experiment run with `master`.
///
/// `mix(m, i) = splitmix64(splitmix64(m) + (i + 1) * GOLDEN_GAMMA)`. The
/// outer finalizer decorrelates neighbouring indices; the inner one keeps
/// small master seeds (0, 1, 2, ...) from producing overlapping families.
#[inline]
pub fn mix(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master).wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Generator for a raw seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Generator for replica `index` under `master`.
pub fn replica_rng(master: u64, index: u64) -> SimRng {
    rng_from_seed(mix(master, index))
}
