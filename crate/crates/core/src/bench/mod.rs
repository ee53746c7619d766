//! Baselines, parameter sweeps, and trade-off selection.

mod baselines;
mod sweep;

pub use baselines::{baseline_farthest_first, baseline_kmeanspp, BaselineMode, Clustering};
pub use sweep::{
    mask_seed, rerun, run_sweep, select_tradeoff, summarize, write_outputs, ConfigEcho, DeltaSummary, RunRecord,
    SeedPick, Suite, SweepGrid, TradeoffSummary, LLOYD_ITERS,
};
