use crate::error::{Error, Result};
use crate::oracle::{PointId, StrongOracle, WeakOracle};

/// Each coreset member's `threshold` nearest members (itself included), kept
/// up to date as members arrive. The ball of a member is the smallest closed
/// ball around it holding exactly `threshold` members, ties broken by arrival
/// order.
#[derive(Clone, Debug)]
pub struct HeavyBallIndex {
    threshold: usize,
    members: Vec<PointId>,
    /// Sorted by `(distance, slot)`.
    balls: Vec<Vec<(f64, u32)>>,
}

impl HeavyBallIndex {
    pub fn new(threshold: usize) -> Self {
        assert!(threshold >= 1);
        Self { threshold, members: Vec::new(), balls: Vec::new() }
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Whether every member's ball is full.
    pub fn ready(&self) -> bool {
        self.members.len() >= self.threshold
    }

    pub fn members(&self) -> &[PointId] {
        &self.members
    }

    /// Radius of the ball of the member in `slot`.
    pub fn radius(&self, slot: usize) -> f64 {
        self.balls[slot].last().map_or(0.0, |e| e.0)
    }

    /// Slots of the members in the ball of `slot`.
    pub fn ball(&self, slot: usize) -> impl Iterator<Item = usize> + '_ {
        self.balls[slot].iter().map(|e| e.1 as usize)
    }

    /// Adds a revealed point. Distances to earlier members come from the
    /// strong oracle at no cost.
    pub fn insert(&mut self, p: PointId, strong: &StrongOracle) -> Result<()> {
        let slot = self.members.len() as u32;
        let mut own = Vec::with_capacity(self.members.len() + 1);
        own.push((0.0, slot));
        for (s, &m) in self.members.iter().enumerate() {
            let d = strong.distance(p, m)?;
            own.push((d, s as u32));
            let ball = &mut self.balls[s];
            let entry = (d, slot);
            let full = ball.len() >= self.threshold;
            if !full || d < ball[ball.len() - 1].0 {
                let at = ball.partition_point(|e| (e.0, e.1) <= entry);
                ball.insert(at, entry);
                if full {
                    ball.pop();
                }
            }
        }
        own.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        own.truncate(self.threshold);
        self.members.push(p);
        self.balls.push(own);
        Ok(())
    }
}

/// Value and attaining member of the heavy-ball nearest distance, given the
/// weak distances `w[slot]` from the query point to every member.
///
/// `Q = min over members x of lowermedian{ w[z] : z in ball(x) } + 6 r_x`,
/// ties by lowest slot. Exact; pruning only skips members whose value is
/// provably larger than the best so far.
pub(crate) fn heavy_ball_min(index: &HeavyBallIndex, w: &[f64], scratch: &mut Vec<f64>) -> (f64, usize) {
    let m = index.len();
    let tau = index.threshold;
    let rank = (tau - 1) / 2;
    // start with the member the weak view puts nearest; usually close to optimal
    let first = (0..m).min_by(|&a, &b| w[a].total_cmp(&w[b])).expect("index is nonempty");
    let eval = |slot: usize, scratch: &mut Vec<f64>| {
        scratch.clear();
        scratch.extend(index.ball(slot).map(|z| w[z]));
        let (_, med, _) = scratch.select_nth_unstable_by(rank, f64::total_cmp);
        *med + 6.0 * index.radius(slot)
    };
    let mut best = (eval(first, scratch), first);
    for slot in 0..m {
        if slot == first {
            continue;
        }
        let six_r = 6.0 * index.radius(slot);
        if six_r > best.0 {
            continue;
        }
        // median > thr iff more than tau - 1 - rank values exceed thr
        let thr = best.0 - six_r;
        let need = tau - rank;
        let mut above = 0;
        let mut pruned = false;
        for z in index.ball(slot) {
            if w[z] > thr {
                above += 1;
                if above >= need {
                    pruned = true;
                    break;
                }
            }
        }
        if pruned {
            continue;
        }
        let q = eval(slot, scratch);
        if q < best.0 || (q == best.0 && slot < best.1) {
            best = (q, slot);
        }
    }
    best
}

/// Heavy-ball nearest distance of `y` to the indexed members, querying the
/// weak oracle from `y` to every member. Returns the value and the attaining
/// member.
pub fn heavy_ball_distance(y: PointId, index: &HeavyBallIndex, weak: &WeakOracle) -> Result<(f64, PointId)> {
    if !index.ready() {
        return Err(Error::InvalidConfig(format!(
            "heavy-ball distance needs {} members, have {}",
            index.threshold,
            index.len()
        )));
    }
    if index.members.contains(&y) {
        return Err(Error::InvalidConfig(format!("point {y} is a member")));
    }
    let mut w = Vec::new();
    weak.query_many(y, &index.members, &mut w)?;
    let (q, slot) = heavy_ball_min(index, &w, &mut Vec::new());
    Ok((q, index.members[slot]))
}
