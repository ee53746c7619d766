use std::sync::Arc;

use super::{Adversary, CorruptionMask, GroundTruth, PointId, QueryLedger};
use crate::error::{Error, Result};

/// Cheap distance oracle: exact on clean pairs, adversarial on corrupted ones.
pub struct WeakOracle {
    truth: Arc<GroundTruth>,
    mask: CorruptionMask,
    adversary: Arc<Adversary>,
    ledger: Arc<QueryLedger>,
}

impl WeakOracle {
    pub(crate) fn new(
        truth: Arc<GroundTruth>,
        mask: CorruptionMask,
        adversary: Arc<Adversary>,
        ledger: Arc<QueryLedger>,
    ) -> Self {
        Self { truth, mask, adversary, ledger }
    }

    pub fn mask(&self) -> &CorruptionMask {
        &self.mask
    }

    pub fn adversary(&self) -> &Adversary {
        &self.adversary
    }

    pub fn n(&self) -> usize {
        self.truth.n()
    }

    /// One weak query; counted.
    pub fn query(&self, x: PointId, y: PointId) -> Result<f64> {
        self.check(x, y)?;
        self.ledger.add_weak(1);
        Ok(self.value(x.idx(), y.idx()))
    }

    /// Queries `x` against every point of `ys`, counting them in one update.
    pub fn query_many(&self, x: PointId, ys: &[PointId], out: &mut Vec<f64>) -> Result<()> {
        out.clear();
        out.reserve(ys.len());
        for &y in ys {
            self.check(x, y)?;
            out.push(self.value(x.idx(), y.idx()));
        }
        self.ledger.add_weak(ys.len() as u64);
        Ok(())
    }

    #[inline]
    fn check(&self, x: PointId, y: PointId) -> Result<()> {
        let n = self.truth.n();
        if x.idx() >= n {
            return Err(Error::OutOfRange(x, n));
        }
        if y.idx() >= n {
            return Err(Error::OutOfRange(y, n));
        }
        if x == y {
            return Err(Error::SelfQuery(x));
        }
        Ok(())
    }

    #[inline]
    fn value(&self, a: usize, b: usize) -> f64 {
        let d = self.truth.distance(a, b);
        if self.mask.contains(a, b) {
            self.adversary.value(a, b, d, &self.truth, &self.mask)
        } else {
            d
        }
    }
}
