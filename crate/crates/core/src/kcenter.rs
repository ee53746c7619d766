//! k-center with a corrupted weak oracle: greedy ball carving on strong-queried
//! samples, median distance estimation against complete balls, recursive
//! sample-and-cover, and a search over the radius guess `R = (1+eps)^l`.
//!
//! For a guess `R >= 2 OPT` every point ends within `6R` of a candidate center,
//! and the final carve of the candidates at `R` leaves at most `k` centers, so
//! every point is within `7R` of its final center.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keyed::{keyed, salt};
use crate::oracle::{scaled_sample_size, Evaluator, LedgerSnapshot, OracleSet, PointId, StrongMode, StrongOracle, WeakOracle};
use crate::stats::lower_median;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KCenterConfig {
    pub k: usize,
    pub epsilon: f64,
    /// Corruption probability the sample sizes are scaled for.
    pub delta: f64,
    /// `|S| = c_s * k * log2 n` before scaling.
    pub c_s: f64,
    /// `|T| = c_t * k * log2 n` before scaling.
    pub c_t: f64,
    /// A ball is heavy when it holds `c_heavy * n / (10 k)` points.
    pub c_heavy: f64,
    /// A ball is complete when `T` puts `c_complete * log2 n` points in it.
    pub c_complete: f64,
    /// Multiplier on all three sampling sizes; the experiments sweep it.
    pub scale: f64,
    /// Sample-and-cover aborts after `ceil(rounds_factor * log2 n)` rounds.
    pub rounds_factor: f64,
    pub seed: u64,
    pub mode: StrongMode,
}

impl KCenterConfig {
    pub fn new(k: usize, delta: f64, seed: u64) -> Self {
        Self {
            k,
            epsilon: 0.1,
            delta,
            c_s: 4.0,
            c_t: 80.0,
            c_heavy: 1.0,
            c_complete: 4.0,
            scale: 1.0,
            rounds_factor: 2.0,
            seed,
            mode: StrongMode::Point,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig("epsilon must be positive".into()));
        }
        for (name, v) in [
            ("c_s", self.c_s),
            ("c_t", self.c_t),
            ("c_heavy", self.c_heavy),
            ("c_complete", self.c_complete),
            ("scale", self.scale),
            ("rounds_factor", self.rounds_factor),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Concrete per-round sizes derived from a config and instance size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub s: usize,
    pub t: usize,
    pub complete: usize,
    pub heavy: usize,
    pub max_rounds: usize,
}

impl SamplePlan {
    pub fn new(cfg: &KCenterConfig, n: usize) -> Result<Self> {
        cfg.validate()?;
        let lg = log2n(n);
        let size = |c: f64| scaled_sample_size((cfg.scale * c * lg).ceil() as usize, cfg.delta);
        Ok(Self {
            s: size(cfg.c_s * cfg.k as f64)?.max(cfg.k + 1),
            t: size(cfg.c_t * cfg.k as f64)?.max(1),
            complete: size(cfg.c_complete)?.max(1),
            heavy: (cfg.c_heavy * n as f64 / (10.0 * cfg.k as f64)).ceil() as usize,
            max_rounds: (cfg.rounds_factor * lg).ceil() as usize,
        })
    }
}

pub(crate) fn log2n(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

/// Exact-distance access in either strong-oracle mode.
#[derive(Clone, Copy)]
struct Exact<'a> {
    strong: &'a StrongOracle,
    mode: StrongMode,
}

impl Exact<'_> {
    fn reveal(&self, x: PointId) -> Result<()> {
        if self.mode == StrongMode::Point {
            self.strong.point_query(x)?;
        }
        Ok(())
    }

    fn dist(&self, x: PointId, y: PointId) -> Result<f64> {
        if x == y {
            return Ok(0.0);
        }
        match self.mode {
            StrongMode::Point => self.strong.distance(x, y),
            StrongMode::Edge => self.strong.edge_query(x, y),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarveResult {
    pub centers: Vec<PointId>,
    /// `(point, center)` for every input point, in input order.
    pub assignment: Vec<(PointId, PointId)>,
    pub radius_used: f64,
}

/// Greedy ball carving: repeatedly take the lowest-indexed uncovered point as a
/// center and cover everything within `radius` of it.
///
/// More than `k` centers certifies `radius < 2 OPT`.
pub fn greedy_ball_carve_by<F>(points: &[PointId], radius: f64, mut dist: F) -> Result<CarveResult>
where
    F: FnMut(PointId, PointId) -> Result<f64>,
{
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by_key(|&i| points[i]);
    let mut center_of: Vec<Option<PointId>> = vec![None; points.len()];
    let mut centers = Vec::new();
    let mut remaining = order;
    while let Some(&first) = remaining.first() {
        let c = points[first];
        centers.push(c);
        let mut next = Vec::with_capacity(remaining.len());
        for &i in &remaining {
            if i == first || dist(c, points[i])? <= radius {
                center_of[i] = Some(c);
            } else {
                next.push(i);
            }
        }
        remaining = next;
    }
    let assignment = points
        .iter()
        .zip(center_of)
        .map(|(&p, c)| (p, c.expect("every point is carved")))
        .collect();
    Ok(CarveResult { centers, assignment, radius_used: radius })
}

/// Greedy ball carving over points already revealed to `strong`.
pub fn greedy_ball_carve(points: &[PointId], radius: f64, strong: &StrongOracle) -> Result<CarveResult> {
    greedy_ball_carve_by(points, radius, |a, b| if a == b { Ok(0.0) } else { strong.distance(a, b) })
}

/// Lower median of the weak distances from `x` to every point of `anchors`.
///
/// When `anchors` sit in a ball of radius `r` around some `u` and fewer than
/// half of the pairs are corrupted, the result is within `r` of `d(x, u)`.
pub fn median_estimate(weak: &WeakOracle, x: PointId, anchors: &[PointId]) -> Result<f64> {
    let mut buf = Vec::with_capacity(anchors.len());
    median_estimate_with(weak, x, anchors, &mut buf)
}

fn median_estimate_with(weak: &WeakOracle, x: PointId, anchors: &[PointId], buf: &mut Vec<f64>) -> Result<f64> {
    if anchors.is_empty() {
        return Err(Error::Empty("median estimate needs at least one anchor"));
    }
    weak.query_many(x, anchors, buf)?;
    Ok(lower_median(buf).expect("nonempty"))
}

/// Why a guess of `R` was rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum Abort {
    /// A carve at radius `R` produced more than `k` centers.
    TooManyCenters { round: usize, centers: usize },
    /// The final carve of the candidate centers produced more than `k`.
    TooManyFinalCenters { centers: usize },
    TooManyRounds { rounds: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundStats {
    pub round: usize,
    pub active: usize,
    /// Points strong-queried this round.
    pub sampled: usize,
    pub carve_centers: usize,
    pub complete_balls: usize,
    /// Active points outside the samples that were assigned by estimation.
    pub covered: usize,
    /// Points deferred because two far-apart balls both passed them.
    pub conflicts: usize,
    /// `covered / (active - sampled)`; 1 for the direct tail round.
    pub coverage: f64,
}

enum Decision {
    Assign(PointId),
    Conflict,
    Uncovered,
}

/// Output of one sample-and-cover pass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    /// Candidate centers, each revealed to the strong oracle.
    pub candidates: Vec<PointId>,
    /// `(point, candidate)` for every point of the input set.
    pub assignment: Vec<(PointId, PointId)>,
    /// Non-candidate points that were strong-queried.
    pub so_points: Vec<PointId>,
    pub rounds: Vec<RoundStats>,
}

/// Recursive sample and cover at guess `radius` over the `active` points.
///
/// Each round strong-queries a sample `S` and a larger sample `T`, carves `S`
/// at `radius`, keeps the balls `B(c, 3R)` that `T` certifies as complete, and
/// assigns every other active point whose median weak distance to a complete
/// ball's `T` members is at most `6R`. Uncovered points go to the next round,
/// as do points that pass two balls too far apart to both be honest.
pub fn sample_and_cover(
    oracles: &OracleSet,
    active: &[PointId],
    radius: f64,
    cfg: &KCenterConfig,
    plan: &SamplePlan,
) -> Result<std::result::Result<Cover, Abort>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidConfig(format!("radius must be positive, got {radius}")));
    }
    let exact = Exact { strong: &oracles.strong, mode: cfg.mode };
    let mut active: Vec<PointId> = active.to_vec();
    active.sort_unstable();
    active.dedup();

    let mut cover = Cover { candidates: vec![], assignment: vec![], so_points: vec![], rounds: vec![] };

    for round in 0.. {
        if active.is_empty() {
            break;
        }
        if round >= plan.max_rounds {
            return Ok(Err(Abort::TooManyRounds { rounds: round }));
        }

        if active.len() <= plan.s + plan.t {
            // tail: reveal the remainder and carve it directly
            for &p in &active {
                exact.reveal(p)?;
            }
            let carve = greedy_ball_carve_by(&active, radius, |a, b| exact.dist(a, b))?;
            if carve.centers.len() > cfg.k {
                return Ok(Err(Abort::TooManyCenters { round, centers: carve.centers.len() }));
            }
            cover.rounds.push(RoundStats {
                round,
                active: active.len(),
                sampled: active.len(),
                carve_centers: carve.centers.len(),
                complete_balls: 0,
                covered: 0,
                conflicts: 0,
                coverage: 1.0,
            });
            cover.so_points.extend(carve.assignment.iter().filter(|(p, c)| p != c).map(|(p, _)| *p));
            cover.assignment.extend(carve.assignment);
            cover.candidates.extend(carve.centers);
            break;
        }

        let mut rng = ChaCha8Rng::seed_from_u64(keyed(cfg.seed ^ round as u64, salt::ROUND));
        let picks = index::sample(&mut rng, active.len(), plan.s + plan.t).into_vec();
        let mut s_pts: Vec<PointId> = picks[..plan.s].iter().map(|&i| active[i]).collect();
        let mut t_pts: Vec<PointId> = picks[plan.s..].iter().map(|&i| active[i]).collect();
        s_pts.sort_unstable();
        t_pts.sort_unstable();
        for &p in s_pts.iter().chain(&t_pts) {
            exact.reveal(p)?;
        }

        // Step 1: carve S
        let carve = greedy_ball_carve_by(&s_pts, radius, |a, b| exact.dist(a, b))?;
        if carve.centers.len() > cfg.k {
            return Ok(Err(Abort::TooManyCenters { round, centers: carve.centers.len() }));
        }

        // Step 2: complete balls from T; T points join the first ball within 3R
        let mut ball_members: Vec<Vec<PointId>> = vec![Vec::new(); carve.centers.len()];
        for &t in &t_pts {
            let mut home = None;
            for (bi, &c) in carve.centers.iter().enumerate() {
                if exact.dist(c, t)? <= 3.0 * radius {
                    ball_members[bi].push(t);
                    home.get_or_insert(c);
                }
            }
            match home {
                Some(c) => {
                    cover.assignment.push((t, c));
                    cover.so_points.push(t);
                }
                None => {
                    cover.assignment.push((t, t));
                    cover.candidates.push(t);
                }
            }
        }
        cover.so_points.extend(carve.assignment.iter().filter(|(p, c)| p != c).map(|(p, _)| *p));
        cover.assignment.extend(carve.assignment.iter().copied());
        cover.candidates.extend(carve.centers.iter().copied());
        let complete: Vec<(PointId, &[PointId])> = carve
            .centers
            .iter()
            .zip(&ball_members)
            .filter(|(_, m)| m.len() >= plan.complete)
            .map(|(&c, m)| (c, m.as_slice()))
            .collect();

        // Steps 3-4: estimate the rest against complete balls
        let sampled = s_pts.len() + t_pts.len();
        let mut in_sample = s_pts.clone();
        in_sample.extend(&t_pts);
        in_sample.sort_unstable();
        let rest: Vec<PointId> = active.iter().copied().filter(|p| in_sample.binary_search(p).is_err()).collect();
        // An honest pass puts x within 9R of the center, so two passing
        // balls whose centers are more than 18R apart expose a corrupted
        // estimate; such points are deferred to the next round.
        let mut far_apart = vec![false; complete.len() * complete.len()];
        for (i, &(a, _)) in complete.iter().enumerate() {
            for (j, &(b, _)) in complete.iter().enumerate() {
                far_apart[i * complete.len() + j] = exact.dist(a, b)? > 18.0 * radius;
            }
        }
        let decided: Vec<Decision> = rest
            .par_iter()
            .map_init(Vec::new, |buf, &x| -> Result<Decision> {
                let mut first = None;
                for (i, &(_, members)) in complete.iter().enumerate() {
                    let est = median_estimate_with(&oracles.weak, x, members, buf)?;
                    if est <= 6.0 * radius {
                        match first {
                            None => first = Some(i),
                            Some(f) if far_apart[f * complete.len() + i] => return Ok(Decision::Conflict),
                            Some(_) => {}
                        }
                    }
                }
                Ok(first.map_or(Decision::Uncovered, |i| Decision::Assign(complete[i].0)))
            })
            .collect::<Result<_>>()?;

        let mut next = Vec::new();
        let mut covered = 0;
        let mut conflicts = 0;
        for (&x, d) in rest.iter().zip(decided) {
            match d {
                Decision::Assign(c) => {
                    cover.assignment.push((x, c));
                    covered += 1;
                }
                Decision::Conflict => {
                    conflicts += 1;
                    next.push(x);
                }
                Decision::Uncovered => next.push(x),
            }
        }
        cover.rounds.push(RoundStats {
            round,
            active: active.len(),
            sampled,
            carve_centers: carve.centers.len(),
            complete_balls: complete.len(),
            covered,
            conflicts,
            coverage: if rest.is_empty() { 1.0 } else { covered as f64 / rest.len() as f64 },
        });
        active = next;
    }
    Ok(Ok(cover))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub level: i64,
    pub radius: f64,
    pub accepted: bool,
    pub abort: Option<Abort>,
    pub strong_points_after: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KCenterSolution {
    pub centers: Vec<PointId>,
    /// Final center of every point, indexed by point.
    pub assignment: Vec<PointId>,
    pub r_final: f64,
    pub level_final: i64,
    pub ledger: LedgerSnapshot,
    pub plan: SamplePlan,
    pub probes: Vec<ProbeRecord>,
    /// Rounds of the accepted sample-and-cover pass.
    pub rounds: Vec<RoundStats>,
}

impl KCenterSolution {
    /// `max_p d(p, center(p))` under the true metric.
    pub fn true_cost(&self, eval: &Evaluator) -> f64 {
        eval.kcenter_cost(&self.assignment)
    }

    /// Upper bound on distinct strong points this configuration can spend:
    /// `(|S| + |T|) * max_rounds * probes`, capped at `n`.
    pub fn strong_budget(&self, n: usize) -> u64 {
        let per_probe = (self.plan.s + self.plan.t) * self.plan.max_rounds;
        (per_probe * self.probes.len()).min(n) as u64
    }
}

/// Strong-point budget implied by a configuration.
///
/// Each round reveals at most `|S| + |T| <= scale (c_s + c_t) m k log2 n + k + 3`
/// points (`m >= 1` is the delta scaling), a pass runs at most
/// `rounds_factor log2 n + 1` rounds, and the radius search makes at most
/// `log2(levels + 1) + 2` passes, where `levels = log_{1+eps} aspect_ratio`.
/// For polynomial aspect ratios this is `C1 k log^2 n log(log n / eps)`.
pub fn strong_point_bound(cfg: &KCenterConfig, n: usize, aspect_ratio: f64) -> f64 {
    let lg = log2n(n);
    let m = (1.0 / (36.0 * (0.5 - cfg.delta).powi(2))).max(1.0);
    let per_round = cfg.scale * (cfg.c_s + cfg.c_t) * m * cfg.k as f64 * lg + cfg.k as f64 + 3.0;
    let rounds = cfg.rounds_factor * lg + 1.0;
    let passes = ((levels(cfg.epsilon, aspect_ratio) + 1) as f64).log2() + 2.0;
    per_round * rounds * passes
}

fn levels(epsilon: f64, aspect_ratio: f64) -> i64 {
    (aspect_ratio.max(1.0).ln() / (1.0 + epsilon).ln()).ceil() as i64
}

struct Accepted {
    cover: Cover,
    centers: Vec<PointId>,
    final_of: Vec<(PointId, PointId)>,
}

fn probe(oracles: &OracleSet, cfg: &KCenterConfig, plan: &SamplePlan, all: &[PointId], radius: f64) -> Result<std::result::Result<Accepted, Abort>> {
    let cover = match sample_and_cover(oracles, all, radius, cfg, plan)? {
        Ok(c) => c,
        Err(a) => return Ok(Err(a)),
    };
    let exact = Exact { strong: &oracles.strong, mode: cfg.mode };
    let carve = greedy_ball_carve_by(&cover.candidates, radius, |a, b| exact.dist(a, b))?;
    if carve.centers.len() > cfg.k {
        return Ok(Err(Abort::TooManyFinalCenters { centers: carve.centers.len() }));
    }
    Ok(Ok(Accepted { cover, centers: carve.centers, final_of: carve.assignment }))
}

/// Full k-center solver: search over `R = (1+eps)^l` for a level whose pass
/// succeeds while the level below aborts, then compose assignments.
pub fn kcenter_solve(oracles: &OracleSet, cfg: &KCenterConfig) -> Result<KCenterSolution> {
    let n = oracles.n();
    let plan = SamplePlan::new(cfg, n)?;
    if cfg.k >= n {
        // every point is its own center
        let all: Vec<PointId> = (0..n).map(PointId::from_idx).collect();
        return Ok(KCenterSolution {
            centers: all.clone(),
            assignment: all,
            r_final: 0.0,
            level_final: -1,
            ledger: oracles.snapshot(),
            plan,
            probes: vec![],
            rounds: vec![],
        });
    }
    let all: Vec<PointId> = (0..n).map(PointId::from_idx).collect();
    let radius_at = |l: i64| (1.0 + cfg.epsilon).powi(l as i32);
    let mut probes = Vec::new();
    let run = |l: i64, probes: &mut Vec<ProbeRecord>| -> Result<Option<Accepted>> {
        let r = radius_at(l);
        let out = probe(oracles, cfg, &plan, &all, r)?;
        probes.push(ProbeRecord {
            level: l,
            radius: r,
            accepted: out.is_ok(),
            abort: out.as_ref().err().cloned(),
            strong_points_after: oracles.ledger().strong_point_count(),
        });
        Ok(out.ok())
    };

    // the top of the range covers everything with one ball; widen if an
    // extreme adversary still makes it fail
    let mut hi = levels(cfg.epsilon, oracles.aspect_ratio());
    let mut lo = -1i64;
    let mut best = loop {
        match run(hi, &mut probes)? {
            Some(acc) => break acc,
            None => {
                lo = hi;
                hi = (hi.max(1) * 2).max(hi + 1);
                if radius_at(hi) > 1e300 {
                    return Err(Error::InvalidConfig("no radius guess succeeds".into()));
                }
            }
        }
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match run(mid, &mut probes)? {
            Some(acc) => {
                hi = mid;
                best = acc;
            }
            None => lo = mid,
        }
    }

    let mut final_center = vec![PointId(u32::MAX); n];
    for &(cand, f) in &best.final_of {
        final_center[cand.idx()] = f;
    }
    let mut assignment = vec![PointId(u32::MAX); n];
    for &(p, cand) in &best.cover.assignment {
        assignment[p.idx()] = final_center[cand.idx()];
    }
    debug_assert!(assignment.iter().all(|c| c.0 != u32::MAX));

    Ok(KCenterSolution {
        centers: best.centers,
        assignment,
        r_final: radius_at(hi),
        level_final: hi,
        ledger: oracles.snapshot(),
        plan,
        probes,
        rounds: best.cover.rounds,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::oracle::{Adversary, CorruptionMask, GroundTruth};

    fn line(xs: &[f64]) -> Arc<GroundTruth> {
        Arc::new(GroundTruth::from_points(1, xs.to_vec()).unwrap())
    }

    fn ids(n: usize) -> Vec<PointId> {
        (0..n).map(PointId::from_idx).collect()
    }

    #[test]
    fn carve_single_point() {
        let r = greedy_ball_carve_by(&[PointId(3)], 0.5, |_, _| Ok(1.0)).unwrap();
        assert_eq!(r.centers, vec![PointId(3)]);
        assert_eq!(r.assignment, vec![(PointId(3), PointId(3))]);
    }

    #[test]
    fn carve_far_points_gives_one_center_each() {
        let truth = line(&[0.0, 10.0, 20.0, 30.0]);
        let o = OracleSet::exact(truth);
        for p in ids(4) {
            o.strong.point_query(p).unwrap();
        }
        // normalized distances are 1, 2, 3
        let r = greedy_ball_carve(&ids(4), 0.5, &o.strong).unwrap();
        assert_eq!(r.centers.len(), 4);
        let r = greedy_ball_carve(&ids(4), 1.0, &o.strong).unwrap();
        assert_eq!(r.centers, vec![PointId(0), PointId(2)]);
    }

    #[test]
    fn carve_needs_revealed_points() {
        let o = OracleSet::exact(line(&[0.0, 1.0, 2.0]));
        o.strong.point_query(PointId(0)).unwrap();
        assert!(matches!(greedy_ball_carve(&ids(3), 0.5, &o.strong), Err(Error::NotRevealed(_))));
    }

    #[test]
    fn median_without_corruption_is_within_range() {
        let o = OracleSet::exact(line(&[0.0, 1.0, 2.0, 4.0, 7.0]));
        let est = median_estimate(&o.weak, PointId(0), &ids(5)[1..]).unwrap();
        assert_eq!(est, 2.0);
        assert!(median_estimate(&o.weak, PointId(0), &[]).is_err());
    }

    #[test]
    fn median_ignores_minority_of_huge_values() {
        let xs: Vec<f64> = (0..41).map(|i| i as f64).collect();
        let truth = line(&xs);
        let mask = CorruptionMask::new(5, 0.2).unwrap();
        let o = OracleSet::new(truth.clone(), mask, Arc::new(Adversary::Constant(1e12)));
        let anchors: Vec<PointId> = ids(41)[20..].to_vec();
        let corrupted = anchors.iter().filter(|a| mask.contains(0, a.idx())).count();
        assert!(corrupted < anchors.len() / 2);
        let est = median_estimate(&o.weak, PointId(0), &anchors).unwrap();
        let exact = OracleSet::exact(truth);
        let clean = median_estimate(&exact.weak, PointId(0), &anchors).unwrap();
        assert!((20.0..=40.0).contains(&est), "{est}");
        assert!(est >= clean);
    }

    #[test]
    fn empty_active_set_covers_nothing() {
        let o = OracleSet::exact(line(&[0.0, 1.0]));
        let cfg = KCenterConfig::new(1, 0.0, 0);
        let plan = SamplePlan::new(&cfg, 2).unwrap();
        let c = sample_and_cover(&o, &[], 1.0, &cfg, &plan).unwrap().unwrap();
        assert!(c.candidates.is_empty() && c.assignment.is_empty());
        assert_eq!(o.snapshot().strong_point_count, 0);
    }

    #[test]
    fn equidistant_points() {
        // n points at mutual distance 1 (partition metric with singleton groups)
        let n = 30;
        let truth = Arc::new(GroundTruth::from_partition((0..n as u32).collect(), 1.0, 1.0).unwrap());
        let eval = Evaluator::new(&truth);
        for k in [1, 3] {
            let o = OracleSet::exact(truth.clone());
            let sol = kcenter_solve(&o, &KCenterConfig::new(k, 0.0, 1)).unwrap();
            assert!(sol.centers.len() <= k);
            assert!(sol.r_final <= 2.0 * 1.1 + 1e-9);
            assert!(sol.true_cost(&eval) <= 7.0 * sol.r_final);
        }
        let o = OracleSet::exact(truth.clone());
        let sol = kcenter_solve(&o, &KCenterConfig::new(n, 0.0, 1)).unwrap();
        assert_eq!(sol.true_cost(&eval), 0.0);
    }

    #[test]
    fn solve_is_deterministic() {
        let xs: Vec<f64> = (0..400).map(|i| ((i * 7919) % 400) as f64 + (i % 3) as f64 * 1000.0).collect();
        let truth = line(&xs);
        let mask = CorruptionMask::new(3, 0.2).unwrap();
        let adv = Arc::new(Adversary::Uniform { seed: 3, low: 1.0, high: truth.aspect_ratio() });
        let cfg = KCenterConfig { scale: 0.05, ..KCenterConfig::new(3, 0.2, 11) };
        let a = kcenter_solve(&OracleSet::new(truth.clone(), mask, adv.clone()), &cfg).unwrap();
        let b = kcenter_solve(&OracleSet::new(truth.clone(), mask, adv), &cfg).unwrap();
        assert_eq!(a.assignment, b.assignment);
        assert_eq!(a.ledger, b.ledger);
        let eval = Evaluator::new(&truth);
        assert!(a.assignment.iter().enumerate().all(|(p, &c)| eval.distance(PointId::from_idx(p), c) <= 7.0 * a.r_final + 1e-9));
    }

    #[test]
    fn corrupted_passes_across_clusters_are_deferred() {
        // two clusters 1e5 apart; corrupted pairs look adjacent
        let xs: Vec<f64> = (0..600).map(|i| if i < 300 { i as f64 } else { 1e5 + i as f64 }).collect();
        let truth = line(&xs);
        let o = OracleSet::new(truth.clone(), CorruptionMask::new(2, 0.4).unwrap(), Arc::new(Adversary::Constant(1.0)));
        let cfg = KCenterConfig::new(8, 0.4, 2);
        let plan = SamplePlan { s: 10, t: 12, complete: 3, heavy: 1, max_rounds: 200 };
        let cover = sample_and_cover(&o, &ids(600), 100.0, &cfg, &plan).unwrap().unwrap();
        let eval = Evaluator::new(&truth);
        assert!(cover.rounds.iter().map(|r| r.conflicts).sum::<usize>() > 0);
        assert!(cover.assignment.iter().all(|&(p, c)| eval.distance(p, c) <= 9.0 * 100.0));
    }
}
