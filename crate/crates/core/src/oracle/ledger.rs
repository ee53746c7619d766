use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

/// Monotone query counters shared by the oracles of one run.
#[derive(Debug, Default)]
pub struct QueryLedger {
    weak: AtomicU64,
    strong_point: AtomicU64,
    strong_edge: AtomicU64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSnapshot {
    pub weak_count: u64,
    pub strong_point_count: u64,
    pub strong_edge_count: u64,
}

impl QueryLedger {
    pub(crate) fn add_weak(&self, n: u64) {
        self.weak.fetch_add(n, Ordering::Relaxed);
    }

    pub(crate) fn add_strong_point(&self) {
        self.strong_point.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn add_strong_edge(&self) {
        self.strong_edge.fetch_add(1, Ordering::Relaxed);
    }

    pub fn weak_count(&self) -> u64 {
        self.weak.load(Ordering::Relaxed)
    }

    pub fn strong_point_count(&self) -> u64 {
        self.strong_point.load(Ordering::Relaxed)
    }

    pub fn strong_edge_count(&self) -> u64 {
        self.strong_edge.load(Ordering::Relaxed)
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        LedgerSnapshot {
            weak_count: self.weak_count(),
            strong_point_count: self.strong_point_count(),
            strong_edge_count: self.strong_edge_count(),
        }
    }
}

impl LedgerSnapshot {
    /// Counters accumulated since `earlier`.
    pub fn since(&self, earlier: &LedgerSnapshot) -> LedgerSnapshot {
        LedgerSnapshot {
            weak_count: self.weak_count - earlier.weak_count,
            strong_point_count: self.strong_point_count - earlier.strong_point_count,
            strong_edge_count: self.strong_edge_count - earlier.strong_edge_count,
        }
    }
}
