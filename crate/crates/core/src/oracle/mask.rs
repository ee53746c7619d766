use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keyed::{pair_hash, salt, unit};

/// The set of corrupted pairs, realized as a keyed hash of the unordered pair.
///
/// Membership is a pure function of `(seed, x, y, delta)`: the same pair is
/// always corrupted or always clean, without materializing `n^2` bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptionMask {
    seed: u64,
    delta: f64,
}

impl CorruptionMask {
    pub fn new(seed: u64, delta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidDelta(delta, "[0, 1)"));
        }
        Ok(Self { seed, delta })
    }

    pub fn none() -> Self {
        Self { seed: 0, delta: 0.0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.delta > 0.0 && a != b && unit(pair_hash(self.seed, salt::MASK, a, b)) < self.delta
    }
}
