//! k-median and k-means with a corrupted weak oracle: a streaming coreset whose
//! sampling uses the heavy-ball nearest distance as a robust stand-in for
//! `d(y, S)`, a doubling search over the cost guess, and weighted clustering
//! of the strong-queried coreset.

mod index;
mod post;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keyed::{keyed, point_hash, salt, unit};
use crate::kcenter::log2n;
use crate::oracle::{scaled_sample_size, DistanceMatrix, Evaluator, LedgerSnapshot, OracleSet, PointId};

pub use index::{heavy_ball_distance, HeavyBallIndex};
pub use post::{weighted_cost, weighted_postcluster};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// `q = 1`.
    Median,
    /// `q = 2`.
    Means,
}

impl Objective {
    pub fn q(self) -> u32 {
        match self {
            Objective::Median => 1,
            Objective::Means => 2,
        }
    }

    #[inline]
    pub fn apply(self, d: f64) -> f64 {
        match self {
            Objective::Median => d,
            Objective::Means => d * d,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KClusterConfig {
    pub k: usize,
    pub objective: Objective,
    pub delta: f64,
    /// Heavy balls hold `max(ceil(c_threshold * log2 n), 32)` members before
    /// the corruption scaling.
    pub c_threshold: f64,
    /// The stream aborts once the coreset exceeds `18 * cap_scale * k * log2^2 n`.
    pub cap_scale: f64,
    /// Randomize the stream order (keyed by the seed) instead of input order.
    pub shuffle: bool,
    /// Seedings tried by the post-clustering.
    pub post_trials: usize,
    pub seed: u64,
}

impl KClusterConfig {
    pub fn new(k: usize, objective: Objective, delta: f64, seed: u64) -> Self {
        Self { k, objective, delta, c_threshold: 16.0, cap_scale: 1.0, shuffle: false, post_trials: 3, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if !(self.c_threshold > 0.0 && self.cap_scale > 0.0) {
            return Err(Error::InvalidConfig("c_threshold and cap_scale must be positive".into()));
        }
        Ok(())
    }
}

/// Concrete sizes for one instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamPlan {
    pub threshold: usize,
    pub cap: usize,
    /// `f = guess / f_divisor`.
    pub f_divisor: f64,
}

impl StreamPlan {
    pub fn new(cfg: &KClusterConfig, n: usize) -> Result<Self> {
        cfg.validate()?;
        let lg = log2n(n);
        let base = ((cfg.c_threshold * lg).ceil() as usize).max(32);
        let threshold = scaled_sample_size(base, cfg.delta)?.max(1);
        let cap = coreset_cap(cfg, n);
        Ok(Self { threshold, cap, f_divisor: 20.0 * cfg.k as f64 * lg * lg })
    }
}

/// Largest coreset a run may build: `18 * cap_scale * k * log2^2 n`.
pub fn coreset_cap(cfg: &KClusterConfig, n: usize) -> usize {
    let lg = log2n(n);
    (18.0 * cfg.cap_scale * cfg.k as f64 * lg * lg).ceil() as usize
}

/// Weighted, strong-queried summary of the stream.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Coreset {
    pub members: Vec<PointId>,
    /// Points represented by each member, itself included.
    pub weights: Vec<u64>,
    /// Member slot of every point, indexed by point.
    pub slot: Vec<u32>,
}

impl Coreset {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `sum_p d(p, member(p))^q` under the true metric.
    pub fn cost(&self, eval: &Evaluator<'_>, objective: Objective) -> f64 {
        self.slot
            .iter()
            .enumerate()
            .map(|(p, &s)| objective.apply(eval.distance(PointId::from_idx(p), self.members[s as usize])))
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StreamAbort {
    /// The coreset outgrew the cap after `processed` stream points.
    TooManySamples { processed: usize },
}

/// Order in which the stream visits the points.
pub fn stream_order(n: usize, cfg: &KClusterConfig) -> Vec<PointId> {
    let mut order: Vec<PointId> = (0..n).map(PointId::from_idx).collect();
    if cfg.shuffle {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(keyed(cfg.seed, salt::ROUND)));
    }
    order
}

/// One pass of the streaming coreset for a fixed cost guess.
///
/// The first `threshold` points are always admitted. After that, point `y` is
/// admitted when its keyed uniform draw is below `Q(y,S)^q / f`, and otherwise
/// charged to the member attaining `Q`. Draws depend only on the seed and the
/// point, so every guess sees the same coins.
pub fn coreset_stream(
    oracles: &OracleSet,
    order: &[PointId],
    guess: f64,
    plan: &StreamPlan,
    cfg: &KClusterConfig,
) -> Result<Result<Coreset, StreamAbort>> {
    if !(guess > 0.0) {
        return Err(Error::InvalidConfig(format!("cost guess must be positive, got {guess}")));
    }
    let n = oracles.n();
    let f = guess / plan.f_divisor;
    let mut index = HeavyBallIndex::new(plan.threshold);
    let mut weights: Vec<u64> = Vec::new();
    let mut slot = vec![u32::MAX; n];
    let mut w = Vec::new();
    let mut scratch = Vec::new();
    for (processed, &y) in order.iter().enumerate() {
        let admit = if !index.ready() {
            true
        } else {
            oracles.weak.query_many(y, index.members(), &mut w)?;
            let (q, at) = index::heavy_ball_min(&index, &w, &mut scratch);
            let p = cfg.objective.apply(q) / f;
            if unit(point_hash(cfg.seed, salt::STREAM_DRAW, y.idx())) < p {
                true
            } else {
                weights[at] += 1;
                slot[y.idx()] = at as u32;
                false
            }
        };
        if admit {
            if index.len() >= plan.cap {
                return Ok(Err(StreamAbort::TooManySamples { processed: processed + 1 }));
            }
            oracles.strong.point_query(y)?;
            slot[y.idx()] = index.len() as u32;
            index.insert(y, &oracles.strong)?;
            weights.push(1);
        }
    }
    Ok(Ok(Coreset { members: index.members().to_vec(), weights, slot }))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GuessProbe {
    pub exponent: i32,
    pub guess: f64,
    pub accepted: bool,
    pub coreset_size: Option<usize>,
    pub strong_points_after: u64,
}

/// Search over guesses `2^i` for `i` between `floor(log2 n) - 1` and
/// `ceil(log2(n Delta^q))`, descending one exponent at a time and stopping at
/// the first guess whose stream aborts. Returns the smallest accepted guess
/// with its coreset.
///
/// Draws are shared across guesses, so the coreset of a lower guess mostly
/// contains that of a higher one; descending keeps the union of revealed
/// points close to the size of a single coreset, and probes at large guesses
/// are cheap because their coresets stay near the warm-up size.
pub fn guess_opt(
    oracles: &OracleSet,
    cfg: &KClusterConfig,
    plan: &StreamPlan,
) -> Result<(f64, Coreset, Vec<GuessProbe>)> {
    let n = oracles.n();
    let order = stream_order(n, cfg);
    let q = cfg.objective.q() as f64;
    let lo_exp = (n as f64).log2().floor() as i32 - 1;
    let mut hi_exp = ((n as f64).log2() + q * oracles.aspect_ratio().log2()).ceil() as i32;
    let mut probes = Vec::new();
    let run = |e: i32, probes: &mut Vec<GuessProbe>| -> Result<Option<Coreset>> {
        let guess = 2f64.powi(e);
        let out = coreset_stream(oracles, &order, guess, plan, cfg)?.ok();
        probes.push(GuessProbe {
            exponent: e,
            guess,
            accepted: out.is_some(),
            coreset_size: out.as_ref().map(Coreset::len),
            strong_points_after: oracles.ledger().strong_point_count(),
        });
        Ok(out)
    };
    // the top of the range normally accepts; widen it if the cap is tight
    let mut best = None;
    for _ in 0..64 {
        if let Some(c) = run(hi_exp, &mut probes)? {
            best = Some(c);
            break;
        }
        hi_exp += 1;
    }
    let mut best = best.ok_or_else(|| Error::InvalidConfig("no cost guess fits the coreset cap".into()))?;
    while hi_exp > lo_exp {
        match run(hi_exp - 1, &mut probes)? {
            Some(c) => {
                hi_exp -= 1;
                best = c;
            }
            None => break,
        }
    }
    Ok((2f64.powi(hi_exp), best, probes))
}

#[derive(Clone, Debug, Serialize)]
pub struct KClusterSolution {
    pub objective: Objective,
    pub centers: Vec<PointId>,
    /// Final center of every point.
    pub assignment: Vec<PointId>,
    pub opt_guess: f64,
    pub coreset: Coreset,
    pub plan: StreamPlan,
    pub probes: Vec<GuessProbe>,
    pub ledger: LedgerSnapshot,
}

impl KClusterSolution {
    /// `sum_p d(p, center(p))^q` under the true metric.
    pub fn true_cost(&self, eval: &Evaluator<'_>) -> f64 {
        eval.sum_cost(&self.assignment, self.objective.q())
    }
}

/// Guess the cost, build the coreset, cluster it, and hand every point the
/// final center of its coreset member.
pub fn kcluster_solve(oracles: &OracleSet, cfg: &KClusterConfig) -> Result<KClusterSolution> {
    let n = oracles.n();
    let plan = StreamPlan::new(cfg, n)?;
    if plan.cap < plan.threshold.min(n) {
        return Err(Error::InvalidConfig(format!(
            "coreset cap {} is below the warm-up size {}",
            plan.cap, plan.threshold
        )));
    }
    let (opt_guess, coreset, probes) = guess_opt(oracles, cfg, &plan)?;
    let m = coreset.len();
    let dm = DistanceMatrix::from_fn(m, |i, j| {
        oracles.strong.distance(coreset.members[i], coreset.members[j]).expect("members are revealed")
    });
    let weights: Vec<f64> = coreset.weights.iter().map(|&w| w as f64).collect();
    let chosen = weighted_postcluster(&dm, &weights, cfg.k, cfg.objective, keyed(cfg.seed, salt::ROUND), cfg.post_trials);
    let centers: Vec<PointId> = chosen.iter().map(|&c| coreset.members[c]).collect();
    let member_center: Vec<PointId> = (0..m)
        .map(|i| {
            let best = chosen
                .iter()
                .min_by(|&&a, &&b| crate::oracle::Distances::dist(&dm, i, a).total_cmp(&crate::oracle::Distances::dist(&dm, i, b)))
                .expect("at least one center");
            coreset.members[*best]
        })
        .collect();
    let assignment = coreset.slot.iter().map(|&s| member_center[s as usize]).collect();
    Ok(KClusterSolution {
        objective: cfg.objective,
        centers,
        assignment,
        opt_guess,
        coreset,
        plan,
        probes,
        ledger: oracles.snapshot(),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::Rng;

    use super::*;
    use crate::oracle::{Distances, GroundTruth};

    fn random_points(n: usize, seed: u64) -> Arc<GroundTruth> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..2 * n).map(|_| rng.gen::<f64>() * 10.0).collect();
        Arc::new(GroundTruth::from_points(2, data).unwrap())
    }

    #[test]
    fn infinite_guess_keeps_only_warmup() {
        let truth = random_points(200, 1);
        let o = OracleSet::exact(truth);
        let cfg = KClusterConfig::new(3, Objective::Median, 0.0, 4);
        let plan = StreamPlan::new(&cfg, 200).unwrap();
        let order = stream_order(200, &cfg);
        let c = coreset_stream(&o, &order, f64::INFINITY, &plan, &cfg).unwrap().unwrap();
        assert_eq!(c.len(), plan.threshold);
        assert_eq!(c.members, order[..plan.threshold].to_vec());
        assert_eq!(c.weights.iter().sum::<u64>(), 200);
    }

    #[test]
    fn tiny_guess_aborts() {
        let truth = random_points(400, 2);
        let o = OracleSet::exact(truth);
        let mut cfg = KClusterConfig::new(2, Objective::Means, 0.0, 4);
        cfg.cap_scale = 0.02;
        let plan = StreamPlan::new(&cfg, 400).unwrap();
        let order = stream_order(400, &cfg);
        assert!(coreset_stream(&o, &order, 1.0, &plan, &cfg).unwrap().is_err());
    }

    #[test]
    fn weights_are_conserved() {
        let truth = random_points(300, 3);
        let o = OracleSet::exact(truth);
        let mut cfg = KClusterConfig::new(3, Objective::Median, 0.2, 9);
        cfg.shuffle = true;
        let sol = kcluster_solve(&o, &cfg).unwrap();
        assert_eq!(sol.coreset.weights.iter().sum::<u64>(), 300);
        assert!(sol.coreset.len() <= sol.plan.cap);
        assert_eq!(sol.centers.len(), 3);
        for (p, &s) in sol.coreset.slot.iter().enumerate() {
            let member = sol.coreset.members[s as usize];
            if member.idx() == p {
                continue;
            }
            assert!(sol.coreset.members.iter().all(|&m| m.idx() != p));
        }
    }

    #[test]
    fn single_center_median_sanity() {
        // symmetric: a ring of points around the origin plus the origin
        let mut data = vec![0.0, 0.0];
        for i in 0..60 {
            let a = i as f64 * std::f64::consts::TAU / 60.0;
            data.extend([a.cos() * 5.0, a.sin() * 5.0]);
        }
        let truth = Arc::new(GroundTruth::from_points(2, data).unwrap());
        let eval = Evaluator::new(&truth);
        let best = (0..61)
            .map(|c| (0..61).map(|p| eval.dist(p, c)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let o = OracleSet::exact(truth.clone());
        let sol = kcluster_solve(&o, &KClusterConfig::new(1, Objective::Median, 0.0, 1)).unwrap();
        assert!(sol.true_cost(&eval) <= 3.0 * best);
    }

    #[test]
    fn deterministic() {
        let truth = random_points(250, 7);
        let cfg = KClusterConfig::new(4, Objective::Means, 1.0 / 3.0, 11);
        let mk = || {
            let o = OracleSet::new(
                truth.clone(),
                crate::oracle::CorruptionMask::new(5, 1.0 / 3.0).unwrap(),
                Arc::new(crate::oracle::Adversary::Constant(1.0)),
            );
            kcluster_solve(&o, &cfg).unwrap()
        };
        let (a, b) = (mk(), mk());
        assert_eq!(a.centers, b.centers);
        assert_eq!(a.assignment, b.assignment);
        assert_eq!(a.ledger, b.ledger);
    }
}
