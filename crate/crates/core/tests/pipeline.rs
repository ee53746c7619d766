//! End-to-end runs of the public API on small instances.

use std::sync::Arc;

use proptest::prelude::*;
use wsoracle::instances::{gen_mst_nonmetric_lb, gen_sbm, policy_cluster_flip, read_table, write_table};
use wsoracle::kcenter::{kcenter_solve, KCenterConfig};
use wsoracle::kcluster::{kcluster_solve, KClusterConfig, Objective};
use wsoracle::mst::{mst_dense, mst_weak_solve, MstConfig};
use wsoracle::{Adversary, CorruptionMask, Evaluator, GroundTruth};

#[test]
fn table_round_trip() {
    let inst = gen_sbm(60, 3, 1).unwrap();
    let dir = std::env::temp_dir().join(format!("wsoracle-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.bin");
    write_table(&path, &inst.truth).unwrap();
    let back = read_table(&path).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    let (a, b) = (Evaluator::new(&inst.truth), Evaluator::new(&back));
    for i in 0..60 {
        for j in 0..60 {
            let (x, y) = (wsoracle::PointId::from_idx(i), wsoracle::PointId::from_idx(j));
            // reading renormalizes by a minimum distance that carries coordinate cancellation error
            assert!((a.distance(x, y) - b.distance(x, y)).abs() <= 1e-9 * a.distance(x, y));
        }
    }
}

#[test]
fn kcenter_recovers_clusters_under_flips() {
    let inst = gen_sbm(2000, 4, 3).unwrap();
    let oracles = inst.oracles(CorruptionMask::new(3, 0.2).unwrap(), Arc::new(policy_cluster_flip(&inst).unwrap()));
    let sol = kcenter_solve(&oracles, &KCenterConfig::new(4, 0.2, 3)).unwrap();
    let eval = Evaluator::new(&inst.truth);
    let labels = inst.labels.as_ref().unwrap();
    let mut hit: Vec<u32> = sol.centers.iter().map(|c| labels[c.idx()]).collect();
    hit.sort();
    hit.dedup();
    assert_eq!(hit.len(), 4);
    assert!(sol.true_cost(&eval) < 0.5 * inst.meta.aspect_ratio);
    assert!((sol.ledger.strong_point_count as usize) < inst.n());
}

#[test]
fn kmedian_beats_single_center() {
    let inst = gen_sbm(1500, 3, 8).unwrap();
    let oracles = inst.oracles(CorruptionMask::new(8, 0.1).unwrap(), Arc::new(Adversary::Honest));
    let sol = kcluster_solve(&oracles, &KClusterConfig::new(3, Objective::Median, 0.1, 8)).unwrap();
    let eval = Evaluator::new(&inst.truth);
    let ours = sol.true_cost(&eval);
    let one = eval.sum_cost(&vec![sol.centers[0]; inst.n()], 1);
    assert!(sol.centers.len() <= 3);
    assert!(ours < 0.5 * one, "{ours} vs {one}");
}

#[test]
fn weak_mst_spends_no_strong_queries() {
    let inst = gen_mst_nonmetric_lb(256, 2, 1.0 / 3.0).unwrap();
    let oracles = inst.oracles();
    let sol = mst_weak_solve(&oracles, &MstConfig { seed: 2, eps: None, validate_triangles: 0 }).unwrap();
    assert_eq!(sol.tree.edges().len(), 255);
    assert_eq!(sol.construction.strong_point_count, 0);
    assert_eq!(sol.construction.strong_edge_count, 0);
    let eval = Evaluator::new(&inst.truth);
    assert!(sol.true_weight(&eval) >= mst_dense(&eval).weight(&eval) - 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kcenter_never_worse_than_aspect_ratio(seed in 0u64..1000, n in 30usize..120, k in 1usize..4) {
        let coords: Vec<f64> = (0..n).flat_map(|i| {
            let c = (i % k) as f64 * 100.0;
            [c + (i * 7 % 5) as f64, c + (i * 3 % 4) as f64 + (i as f64) * 1e-3]
        }).collect();
        let truth = Arc::new(GroundTruth::from_points(2, coords).unwrap());
        let oracles = wsoracle::OracleSet::new(truth.clone(), CorruptionMask::new(seed, 0.1).unwrap(), Arc::new(Adversary::Honest));
        let sol = kcenter_solve(&oracles, &KCenterConfig::new(k, 0.1, seed)).unwrap();
        let eval = Evaluator::new(&truth);
        prop_assert!(sol.centers.len() <= k);
        prop_assert!(sol.true_cost(&eval) <= truth.aspect_ratio() + 1e-9);
    }
}
