//! Seed derivation for parallel, order-independent randomness.
//!
//! Every random draw in a run is addressed by `(master seed, domain, index)`.
//! ChaCha is counter based, so a derived seed is a random-access read of the
//! keystream at a fixed word position and never depends on which worker asks
//! for it or in what order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream ids used when deriving seeds.
pub mod domain {
    pub const TRIALS: u64 = 0x7472_6961_6c00_0000;
    pub const BOOTSTRAP: u64 = 0x626f_6f74_0000_0000;
    pub const PERMUTATION: u64 = 0x7065_726d_0000_0000;
}

/// Seed for item `index` of `domain` under `master`.
pub fn derive_seed(master: u64, domain: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(domain);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

/// Generator used to lay out a trial.
pub fn trial_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for one (trial, lane) rollout; lane 0 is reserved for
/// trial layout.
pub fn rollout_rng(trial_seed: u64, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    rng.set_stream(lane.max(1));
    rng
}

pub fn stats_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stable 64-bit FNV-1a, used to turn labels into stream lanes.
pub fn lane_of(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}
