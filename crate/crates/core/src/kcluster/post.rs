use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Objective;
use crate::oracle::Distances;

/// Weighted cost of serving every point from its nearest center.
pub fn weighted_cost(d: &impl Distances, weights: &[f64], centers: &[usize], q: Objective) -> f64 {
    (0..d.len())
        .map(|i| {
            let near = centers.iter().map(|&c| d.dist(i, c)).fold(f64::INFINITY, f64::min);
            weights[i] * q.apply(near)
        })
        .sum()
}

/// Weighted D^q seeding.
fn seed_centers(d: &impl Distances, weights: &[f64], k: usize, q: Objective, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let m = d.len();
    let first = WeightedIndex::new(weights).expect("weights are positive").sample(rng);
    let mut centers = vec![first];
    let mut near: Vec<f64> = (0..m).map(|i| q.apply(d.dist(i, first))).collect();
    while centers.len() < k {
        let mass: Vec<f64> = (0..m).map(|i| weights[i] * near[i]).collect();
        let next = match WeightedIndex::new(&mass) {
            Ok(dist) => dist.sample(rng),
            // every point coincides with a center: fill with unused points
            Err(_) => (0..m).find(|i| !centers.contains(i)).expect("k <= m"),
        };
        centers.push(next);
        for i in 0..m {
            near[i] = near[i].min(q.apply(d.dist(i, next)));
        }
    }
    centers
}

/// Nearest and second-nearest center distance (already raised to `q`) per point.
fn nearest_two(d: &impl Distances, centers: &[usize], q: Objective) -> Vec<(usize, f64, f64)> {
    (0..d.len())
        .map(|i| {
            let mut best = (usize::MAX, f64::INFINITY);
            let mut second = f64::INFINITY;
            for (t, &c) in centers.iter().enumerate() {
                let v = q.apply(d.dist(i, c));
                if v < best.1 {
                    second = best.1;
                    best = (t, v);
                } else if v < second {
                    second = v;
                }
            }
            (best.0, best.1, second)
        })
        .collect()
}

/// Single-swap local search: replace one center by one non-center whenever
/// that lowers the weighted cost by a relative `1e-9`.
fn swap_search(d: &impl Distances, weights: &[f64], centers: &mut [usize], q: Objective, max_rounds: usize) {
    let m = d.len();
    for _ in 0..max_rounds {
        let near = nearest_two(d, centers, q);
        let cost: f64 = (0..m).map(|i| weights[i] * near[i].1).sum();
        let mut best = (0.0, usize::MAX, usize::MAX);
        for cand in 0..m {
            if centers.contains(&cand) {
                continue;
            }
            // delta[t]: cost change when center t is replaced by cand
            let mut delta = vec![0.0; centers.len()];
            let mut gain_all = 0.0;
            for i in 0..m {
                let (t, d1, d2) = near[i];
                let dc = q.apply(d.dist(i, cand));
                if dc < d1 {
                    gain_all += weights[i] * (dc - d1);
                } else {
                    delta[t] += weights[i] * (dc.min(d2) - d1);
                }
            }
            for (t, dt) in delta.iter().enumerate() {
                let change = gain_all + dt;
                if change < best.0 {
                    best = (change, t, cand);
                }
            }
        }
        if best.1 == usize::MAX || best.0 > -1e-9 * cost {
            break;
        }
        centers[best.1] = best.2;
    }
}

/// Alternating medoid updates: assign to the nearest center, then move every
/// center to the member of its cluster with the lowest weighted cost.
fn medoid_search(d: &impl Distances, weights: &[f64], centers: &mut [usize], q: Objective, max_rounds: usize) {
    let m = d.len();
    for _ in 0..max_rounds {
        let near = nearest_two(d, centers, q);
        let mut clusters = vec![Vec::new(); centers.len()];
        for (i, n) in near.iter().enumerate() {
            clusters[n.0].push(i);
        }
        let mut changed = false;
        for (t, members) in clusters.iter().enumerate() {
            let cost_of = |c: usize| members.iter().map(|&i| weights[i] * q.apply(d.dist(i, c))).sum::<f64>();
            let mut best = (cost_of(centers[t]), centers[t]);
            for &c in members {
                let v = cost_of(c);
                if v < best.0 * (1.0 - 1e-12) {
                    best = (v, c);
                }
            }
            if best.1 != centers[t] {
                centers[t] = best.1;
                changed = true;
            }
        }
        if !changed || m == 0 {
            break;
        }
    }
}

/// Weighted k-clustering of the coreset members.
///
/// `trials` independent D^q seedings are refined by local search (swaps for
/// k-median, medoid updates for k-means) and the cheapest is kept. Returns
/// member indices; with `k >= m` every member is a center.
pub fn weighted_postcluster(
    d: &impl Distances,
    weights: &[f64],
    k: usize,
    q: Objective,
    seed: u64,
    trials: usize,
) -> Vec<usize> {
    let m = d.len();
    assert_eq!(weights.len(), m);
    if k >= m {
        return (0..m).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..trials.max(1) {
        let mut centers = seed_centers(d, weights, k, q, &mut rng);
        match q {
            Objective::Median => swap_search(d, weights, &mut centers, q, 100),
            Objective::Means => medoid_search(d, weights, &mut centers, q, 100),
        }
        let cost = weighted_cost(d, weights, &centers, q);
        if best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, centers));
        }
    }
    best.expect("at least one trial").1
}
