//! Instance generators: Gaussian cluster mixtures, the experiments' corruption
//! policy, scripted hard instances, and file ingestion.

mod io;
mod lower_bounds;

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{Adversary, CorruptionMask, GroundTruth, OracleSet};

pub use io::{load_points_csv, read_table, write_points_csv, write_table, TABLE_MAGIC, TABLE_VERSION};
pub use lower_bounds::{
    gen_kcenter_lb, gen_mst_metric_lb, gen_mst_nonmetric_lb, gen_mst_nonmetric_lb_with_block, metric_block_size, nonmetric_block_size, KCenterLowerBound,
    LowerBoundMeta, ScriptedInstance,
};

/// Cluster centers sit at `MU * e_i`.
pub const SBM_MU: f64 = 1e5;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub kind: String,
    pub n: usize,
    pub k: usize,
    pub mu: Option<f64>,
    pub seed: u64,
    pub dim: Option<usize>,
    pub aspect_ratio: f64,
    /// Multiplier normalization applied to the raw coordinates.
    pub scale: f64,
}

/// Ground truth plus evaluation-only labels.
#[derive(Clone, Debug)]
pub struct LabeledInstance {
    pub truth: Arc<GroundTruth>,
    pub labels: Option<Vec<u32>>,
    pub meta: InstanceMeta,
}

impl LabeledInstance {
    pub fn n(&self) -> usize {
        self.truth.n()
    }

    /// Fresh oracles over this instance.
    pub fn oracles(&self, mask: CorruptionMask, adversary: Arc<Adversary>) -> OracleSet {
        OracleSet::new(self.truth.clone(), mask, adversary)
    }
}

/// `k` Gaussian clusters `N(MU e_i, I)` in `k` dimensions, sizes differing by
/// at most one, presented in a seeded random order.
pub fn gen_sbm(n: usize, k: usize, seed: u64) -> Result<LabeledInstance> {
    if k == 0 || k > n {
        return Err(Error::InvalidConfig(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<u32> = (0..n).map(|i| (i * k / n) as u32).collect();
    labels.shuffle(&mut rng);
    let dim = k;
    let mut data = Vec::with_capacity(n * dim);
    for &l in &labels {
        for axis in 0..dim {
            let noise: f64 = rng.sample(StandardNormal);
            data.push(noise + if axis == l as usize { SBM_MU } else { 0.0 });
        }
    }
    let truth = GroundTruth::from_points(dim, data)?;
    let meta = InstanceMeta {
        kind: "sbm".into(),
        n,
        k,
        mu: Some(SBM_MU),
        seed,
        dim: Some(dim),
        aspect_ratio: truth.aspect_ratio(),
        scale: truth.scale(),
    };
    Ok(LabeledInstance { truth: Arc::new(truth), labels: Some(labels), meta })
}

/// First same-label and first cross-label distance in index order.
fn representative_distances(truth: &GroundTruth, labels: &[u32]) -> (f64, f64) {
    let n = labels.len();
    let mut intra = None;
    let mut inter = None;
    'scan: for i in 0..n {
        for j in i + 1..n {
            let slot = if labels[i] == labels[j] { &mut intra } else { &mut inter };
            if slot.is_none() {
                *slot = Some(truth.distance(i, j));
            }
            if intra.is_some() && inter.is_some() {
                break 'scan;
            }
        }
    }
    let intra = intra.unwrap_or(1.0);
    (intra, inter.unwrap_or(intra))
}

/// The experiments' policy: corrupted same-cluster pairs report an
/// inter-cluster distance and corrupted cross-cluster pairs an intra-cluster
/// one. The reported values are fixed representatives of the instance.
pub fn policy_cluster_flip(inst: &LabeledInstance) -> Result<Adversary> {
    let labels = inst.labels.as_ref().ok_or(Error::InvalidConfig("cluster flip needs labels".into()))?;
    let (intra_value, inter_value) = representative_distances(&inst.truth, labels);
    Ok(Adversary::ClusterFlip { labels: labels.clone().into(), intra_value, inter_value })
}

/// Cluster flip clamped through `witnesses` clean witness points per pair.
pub fn policy_cluster_flip_repaired(inst: &LabeledInstance, witnesses: usize) -> Result<Adversary> {
    let labels = inst.labels.as_ref().ok_or(Error::InvalidConfig("cluster flip needs labels".into()))?;
    let (intra_value, inter_value) = representative_distances(&inst.truth, labels);
    Ok(Adversary::ClusterFlipRepaired { labels: labels.clone().into(), intra_value, inter_value, witnesses })
}

/// Named corruption policies for command-line use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    Honest,
    ClusterFlip,
    ClusterFlipRepaired,
    /// Uniform in `[1, aspect_ratio]`.
    Uniform,
    /// Always the largest true distance.
    Constant,
}

impl PolicyKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "honest" | "none" => PolicyKind::Honest,
            "cluster-flip" => PolicyKind::ClusterFlip,
            "cluster-flip-repaired" => PolicyKind::ClusterFlipRepaired,
            "uniform" => PolicyKind::Uniform,
            "constant" => PolicyKind::Constant,
            other => return Err(Error::InvalidConfig(format!("unknown policy {other:?}"))),
        })
    }

    pub fn build(self, inst: &LabeledInstance, seed: u64) -> Result<Adversary> {
        let max = inst.truth.aspect_ratio();
        Ok(match self {
            PolicyKind::Honest => Adversary::Honest,
            PolicyKind::ClusterFlip => policy_cluster_flip(inst)?,
            PolicyKind::ClusterFlipRepaired => policy_cluster_flip_repaired(inst, 8)?,
            PolicyKind::Uniform => Adversary::Uniform { seed, low: 1.0, high: max },
            PolicyKind::Constant => Adversary::Constant(max),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{Evaluator, PointId};

    #[test]
    fn single_cluster_labels() {
        let inst = gen_sbm(50, 1, 3).unwrap();
        assert!(inst.labels.as_ref().unwrap().iter().all(|&l| l == 0));
    }

    #[test]
    fn cluster_sizes_balanced() {
        let inst = gen_sbm(100, 7, 1).unwrap();
        let mut sizes = [0usize; 7];
        for &l in inst.labels.as_ref().unwrap() {
            sizes[l as usize] += 1;
        }
        assert!(sizes.iter().all(|&s| s == 14 || s == 15), "{sizes:?}");
        assert_eq!(sizes.iter().sum::<usize>(), 100);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = gen_sbm(300, 4, 9).unwrap();
        let b = gen_sbm(300, 4, 9).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.truth.upper_triangle(), b.truth.upper_triangle());
    }

    #[test]
    fn separation_on_desk_scale_sbm() {
        let inst = gen_sbm(10_000, 7, 0).unwrap();
        let labels = inst.labels.as_ref().unwrap();
        let eval = Evaluator::new(&inst.truth);
        // sampled pairs; the full scan is O(n^2)
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (mut max_intra, mut min_inter) = (0.0f64, f64::INFINITY);
        for _ in 0..200_000 {
            let (a, b) = (rng.gen_range(0..10_000), rng.gen_range(0..10_000));
            if a == b {
                continue;
            }
            let d = eval.distance(PointId::from_idx(a), PointId::from_idx(b));
            if labels[a] == labels[b] {
                max_intra = max_intra.max(d);
            } else {
                min_inter = min_inter.min(d);
            }
        }
        assert!(min_inter / max_intra > 1e3, "{min_inter} / {max_intra}");
        // inter distances are about MU * sqrt(2) in raw units
        let raw = min_inter / inst.truth.scale();
        assert!((raw / (SBM_MU * 2f64.sqrt()) - 1.0).abs() < 1e-3, "{raw}");
    }

    #[test]
    fn cluster_flip_values() {
        let inst = gen_sbm(200, 3, 5).unwrap();
        let labels = inst.labels.clone().unwrap();
        let adv = Arc::new(policy_cluster_flip(&inst).unwrap());
        let mask = CorruptionMask::new(2, 0.3).unwrap();
        let o = inst.oracles(mask, adv);
        let eval = Evaluator::new(&inst.truth);
        let (mut max_intra, mut min_inter) = (0.0f64, f64::INFINITY);
        for a in 0..200 {
            for b in a + 1..200 {
                let d = eval.distance(PointId::from_idx(a), PointId::from_idx(b));
                if labels[a] == labels[b] {
                    max_intra = max_intra.max(d);
                } else {
                    min_inter = min_inter.min(d);
                }
            }
        }
        for a in 0..200 {
            for b in a + 1..200 {
                let (pa, pb) = (PointId::from_idx(a), PointId::from_idx(b));
                let w = o.weak.query(pa, pb).unwrap();
                if !mask.contains(a, b) {
                    assert_eq!(w, eval.distance(pa, pb));
                } else if labels[a] == labels[b] {
                    assert!(w >= min_inter);
                } else {
                    assert!(w <= max_intra);
                }
            }
        }
    }
}
