//! Keyed random substreams.
//!
//! Every random quantity is drawn from a ChaCha stream whose key is
//! `(seed, purpose, a, b)`. Draws therefore depend only on which entity asks,
//! never on evaluation order or thread scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Trial = 1,
    Lottery = 2,
    Score = 3,
    Taste = 4,
    Alpha = 5,
    Strategic = 6,
    Marriage = 7,
    Probe = 8,
}

pub fn substream(seed: u64, purpose: Purpose, a: u64, b: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(&a.to_le_bytes());
    key[24..32].copy_from_slice(&b.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Seed for trial `trial` of a run started with `base`.
pub fn trial_seed(base: u64, trial: u64) -> u64 {
    substream(base, Purpose::Trial, trial, 0).next_u64()
}

/// Tie-break value in `[0, 1)` for the pair `(owner, other)`.
pub fn lottery(seed: u64, purpose: Purpose, owner: usize, other: usize) -> f64 {
    substream(seed, purpose, owner as u64, other as u64).random::<f64>()
}
