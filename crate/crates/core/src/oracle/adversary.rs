use std::sync::Arc;

use super::{CorruptionMask, GroundTruth};
use crate::keyed::{pair_hash, salt, unit};

/// Policy choosing the value the weak oracle reports on a corrupted pair.
///
/// Values are a pure function of the instance (pair, metric, mask), never of
/// query order, so repeated queries agree. Only pairs in the mask are ever
/// altered; [`WeakOracle`](super::WeakOracle) enforces that before consulting
/// the policy.
#[derive(Clone, Debug)]
pub enum Adversary {
    /// Corrupted pairs still report the true distance.
    Honest,
    /// Same-label pairs report `inter_value`, cross-label pairs `intra_value`.
    ClusterFlip { labels: Arc<[u32]>, intra_value: f64, inter_value: f64 },
    /// Cluster flip, then clamped into the interval the triangle inequality
    /// allows through a few witness points whose distances to both endpoints
    /// are uncorrupted.
    ClusterFlipRepaired { labels: Arc<[u32]>, intra_value: f64, inter_value: f64, witnesses: usize },
    /// Keyed uniform value in `[low, high]`.
    Uniform { seed: u64, low: f64, high: f64 },
    Constant(f64),
    /// Partition metric: `near` inside a group, `far` across. Used for the
    /// merged-block MST hard instance, where the reported distances form a
    /// coarser partition than the true one and so remain a metric.
    Partition { group: Arc<[u32]>, near: f64, far: f64 },
    /// Point-level block aliasing: a point `x` matched to `y` looks `near`
    /// to all of `y`'s block and vice versa. Deliberately not a metric.
    MatchedPoints { block: Arc<[u32]>, partner: Arc<[u32]>, near: f64 },
    /// Exactly one pair reports `value`.
    SinglePair { a: u32, b: u32, value: f64 },
}

pub(crate) const UNMATCHED: u32 = u32::MAX;

impl Adversary {
    pub fn name(&self) -> &'static str {
        match self {
            Adversary::Honest => "honest",
            Adversary::ClusterFlip { .. } => "cluster-flip",
            Adversary::ClusterFlipRepaired { .. } => "cluster-flip-repaired",
            Adversary::Uniform { .. } => "uniform",
            Adversary::Constant(_) => "constant",
            Adversary::Partition { .. } => "metric-block",
            Adversary::MatchedPoints { .. } => "matched-points",
            Adversary::SinglePair { .. } => "single-pair",
        }
    }

    /// Whether the policy is intended to keep the reported distances a metric.
    pub fn is_metric_preserving(&self) -> bool {
        matches!(
            self,
            Adversary::Honest | Adversary::Partition { .. } | Adversary::ClusterFlipRepaired { .. }
        )
    }

    /// Value reported for the corrupted pair `{a, b}` whose true distance is `d`.
    pub(crate) fn value(&self, a: usize, b: usize, d: f64, truth: &GroundTruth, mask: &CorruptionMask) -> f64 {
        match self {
            Adversary::Honest => d,
            Adversary::ClusterFlip { labels, intra_value, inter_value } => {
                flip(labels, a, b, *intra_value, *inter_value)
            }
            Adversary::ClusterFlipRepaired { labels, intra_value, inter_value, witnesses } => {
                let v = flip(labels, a, b, *intra_value, *inter_value);
                let (lo, hi) = witness_interval(a, b, *witnesses, truth, mask);
                v.clamp(lo, hi.max(lo))
            }
            Adversary::Uniform { seed, low, high } => {
                low + (high - low) * unit(pair_hash(*seed, salt::UNIFORM_ADVERSARY, a, b))
            }
            Adversary::Constant(v) => *v,
            Adversary::Partition { group, near, far } => {
                if group[a] == group[b] {
                    *near
                } else {
                    *far
                }
            }
            Adversary::MatchedPoints { block, partner, near } => {
                let aliased = |x: usize, y: usize| {
                    let p = partner[x];
                    p != UNMATCHED && block[p as usize] == block[y]
                };
                if block[a] == block[b] || aliased(a, b) || aliased(b, a) {
                    *near
                } else {
                    d
                }
            }
            Adversary::SinglePair { a: x, b: y, value } => {
                let (x, y) = (*x as usize, *y as usize);
                if (a == x && b == y) || (a == y && b == x) {
                    *value
                } else {
                    d
                }
            }
        }
    }
}

fn flip(labels: &[u32], a: usize, b: usize, intra_value: f64, inter_value: f64) -> f64 {
    if labels[a] == labels[b] {
        inter_value
    } else {
        intra_value
    }
}

/// Interval `[max |d(a,z) - d(z,b)|, min d(a,z) + d(z,b)]` over the first
/// `count` points `z` whose pairs with both `a` and `b` are uncorrupted.
fn witness_interval(a: usize, b: usize, count: usize, truth: &GroundTruth, mask: &CorruptionMask) -> (f64, f64) {
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    let mut found = 0;
    for z in 0..truth.n() {
        if found == count {
            break;
        }
        if z == a || z == b || mask.contains(a, z) || mask.contains(z, b) {
            continue;
        }
        let (az, zb) = (truth.distance(a, z), truth.distance(z, b));
        lo = lo.max((az - zb).abs());
        hi = hi.min(az + zb);
        found += 1;
    }
    (lo, hi)
}
