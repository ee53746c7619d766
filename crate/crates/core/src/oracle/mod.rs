//! The hidden metric, the corruption process, and the two oracles.
//!
//! Everything an algorithm learns about distances goes through [`OracleSet`]:
//! [`WeakOracle`] answers any pair cheaply but lies on the pairs selected by a
//! [`CorruptionMask`], and [`StrongOracle`] answers exactly while every query is
//! metered in a shared [`QueryLedger`].

pub(crate) mod adversary;
mod eval;
mod ledger;
mod mask;
mod strong;
mod truth;
mod weak;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use adversary::Adversary;
pub use eval::{DistanceMatrix, Distances, Evaluator, WeakDistances};
pub use ledger::{LedgerSnapshot, QueryLedger};
pub use mask::CorruptionMask;
pub use strong::{StrongMode, StrongOracle, Token};
pub use truth::GroundTruth;
pub(crate) use truth::upper_index;
pub use weak::WeakOracle;

/// Index of a point in an instance, dense in `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub u32);

impl PointId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_idx(i: usize) -> Self {
        PointId(i as u32)
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Weak and strong oracle over one hidden metric, sharing a fresh ledger.
///
/// Each algorithm run gets its own set so that counters reflect that run alone.
pub struct OracleSet {
    pub weak: WeakOracle,
    pub strong: StrongOracle,
    ledger: Arc<QueryLedger>,
    n: usize,
    aspect_ratio: f64,
}

impl OracleSet {
    pub fn new(truth: Arc<GroundTruth>, mask: CorruptionMask, adversary: Arc<Adversary>) -> Self {
        let ledger = Arc::new(QueryLedger::default());
        let n = truth.n();
        let aspect_ratio = truth.aspect_ratio();
        Self {
            weak: WeakOracle::new(truth.clone(), mask, adversary, ledger.clone()),
            strong: StrongOracle::new(truth, ledger.clone()),
            ledger,
            n,
            aspect_ratio,
        }
    }

    /// Oracle pair with no corruption at all.
    pub fn exact(truth: Arc<GroundTruth>) -> Self {
        Self::new(truth, CorruptionMask::none(), Arc::new(Adversary::Honest))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Upper bound on the ratio of largest to smallest nonzero distance.
    /// Public instance metadata; algorithms use it to bound their guesses.
    pub fn aspect_ratio(&self) -> f64 {
        self.aspect_ratio
    }

    pub fn delta(&self) -> f64 {
        self.weak.mask().delta()
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        self.ledger.snapshot()
    }
}

/// Sample size scaled for corruption probability `delta`.
///
/// Concentration for medians needs `O(log n / (1/2 - delta)^2)` samples. The
/// result is normalized so that `delta = 1/3` returns `base` unchanged.
pub fn scaled_sample_size(base: usize, delta: f64) -> Result<usize> {
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::InvalidDelta(delta, "[0, 1/2) for clustering"));
    }
    let gap = 0.5 - delta;
    // (1/(1/2 - delta))^2 / (1/(1/2 - 1/3))^2 = 1 / (36 * gap^2)
    let scaled = base as f64 / (36.0 * gap * gap);
    // absorb rounding noise so the delta = 1/3 anchor maps to `base` exactly
    Ok((scaled - 1e-9).ceil().max(0.0) as usize)
}
