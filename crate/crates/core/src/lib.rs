//! Clustering and minimum spanning trees when distances come from two oracles:
//! a cheap *weak* oracle whose answers are adversarially corrupted on a random
//! subset of pairs, and an exact *strong* oracle whose queries are metered.
//!
//! Algorithms only see distances through [`oracle::OracleSet`]. Solution
//! quality is scored separately through [`oracle::Evaluator`], which reads the
//! hidden metric without touching the query ledger.

pub mod bench;
pub mod error;
pub mod instances;
pub mod kcenter;
pub mod kcluster;
pub mod mst;
pub mod oracle;
pub(crate) mod keyed;
pub mod stats;

pub use error::{Error, Result};
pub use oracle::{
    Adversary, CorruptionMask, Evaluator, GroundTruth, LedgerSnapshot, OracleSet, PointId,
    QueryLedger, StrongOracle, WeakOracle,
};
