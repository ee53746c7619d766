use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{GroundTruth, PointId, QueryLedger};
use crate::error::{Error, Result};

/// How an algorithm obtains exact distances.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrongMode {
    /// Reveal points; any two revealed points have a computable distance.
    #[default]
    Point,
    /// Pay for every distinct exact pair.
    Edge,
}

/// Proof that a point has been revealed by a strong point query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Token(PointId);

impl Token {
    pub fn point(self) -> PointId {
        self.0
    }
}

/// Exact oracle with metered point and edge queries.
pub struct StrongOracle {
    truth: Arc<GroundTruth>,
    ledger: Arc<QueryLedger>,
    revealed: Vec<AtomicBool>,
    edges: Mutex<HashSet<(u32, u32)>>,
}

impl StrongOracle {
    pub(crate) fn new(truth: Arc<GroundTruth>, ledger: Arc<QueryLedger>) -> Self {
        let revealed = (0..truth.n()).map(|_| AtomicBool::new(false)).collect();
        Self { truth, ledger, revealed, edges: Mutex::new(HashSet::new()) }
    }

    /// Reveals `x`. Counted once per distinct point.
    pub fn point_query(&self, x: PointId) -> Result<Token> {
        self.in_range(x)?;
        if !self.revealed[x.idx()].swap(true, Ordering::Relaxed) {
            self.ledger.add_strong_point();
        }
        Ok(Token(x))
    }

    pub fn is_revealed(&self, x: PointId) -> bool {
        self.revealed.get(x.idx()).is_some_and(|r| r.load(Ordering::Relaxed))
    }

    /// Exact distance between two revealed points; free.
    pub fn distance(&self, x: PointId, y: PointId) -> Result<f64> {
        for p in [x, y] {
            self.in_range(p)?;
            if !self.is_revealed(p) {
                return Err(Error::NotRevealed(p));
            }
        }
        Ok(self.truth.distance(x.idx(), y.idx()))
    }

    pub fn token_distance(&self, a: Token, b: Token) -> f64 {
        self.truth.distance(a.0.idx(), b.0.idx())
    }

    /// Coordinates of a revealed point, when the metric is Euclidean.
    pub fn coordinates(&self, x: PointId) -> Result<&[f64]> {
        self.in_range(x)?;
        if !self.is_revealed(x) {
            return Err(Error::NotRevealed(x));
        }
        self.truth.coords(x.idx()).ok_or(Error::NoCoordinates)
    }

    /// Exact distance of one pair. Counted once per distinct pair.
    pub fn edge_query(&self, x: PointId, y: PointId) -> Result<f64> {
        self.in_range(x)?;
        self.in_range(y)?;
        if x == y {
            return Err(Error::SelfQuery(x));
        }
        let key = if x < y { (x.0, y.0) } else { (y.0, x.0) };
        if self.edges.lock().expect("edge set poisoned").insert(key) {
            self.ledger.add_strong_edge();
        }
        Ok(self.truth.distance(x.idx(), y.idx()))
    }

    fn in_range(&self, x: PointId) -> Result<()> {
        if x.idx() >= self.revealed.len() {
            return Err(Error::OutOfRange(x, self.revealed.len()));
        }
        Ok(())
    }
}
