//! Hard instances for the impossibility results. Each one ships its own
//! corruption script: which pairs are corrupted is still drawn by a
//! [`CorruptionMask`], but the reported values are fixed by the construction,
//! and the instance lists the pairs whose weak answer differs from the truth.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::adversary::UNMATCHED;
use crate::oracle::{upper_index, Adversary, CorruptionMask, GroundTruth, OracleSet, PointId};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LowerBoundMeta {
    pub kind: String,
    pub n: usize,
    pub seed: u64,
    pub delta: f64,
    pub block_size: Option<usize>,
    pub blocks: Option<usize>,
    /// Blocks (or points, for the point-level family) taking part in a match.
    pub matched: usize,
    pub matched_fraction: f64,
    pub note: Option<String>,
}

/// Ground truth, the corruption draw, and the scripted adversary.
#[derive(Clone, Debug)]
pub struct ScriptedInstance {
    pub truth: Arc<GroundTruth>,
    pub mask: CorruptionMask,
    pub adversary: Arc<Adversary>,
    /// Pairs whose weak value differs from the true distance.
    pub corrupt: Vec<(PointId, PointId)>,
    pub meta: LowerBoundMeta,
}

impl ScriptedInstance {
    pub fn oracles(&self) -> OracleSet {
        OracleSet::new(self.truth.clone(), self.mask, self.adversary.clone())
    }

    pub fn n(&self) -> usize {
        self.truth.n()
    }
}

/// The k-center family: a matched set `N` whose matching is invisible once a
/// single matched pair is reported at distance `c`.
#[derive(Clone, Debug)]
pub struct KCenterLowerBound {
    pub instance: ScriptedInstance,
    pub c: f64,
    /// The special set `S`; `N` is the union of `matching`.
    pub special: Vec<PointId>,
    pub matching: Vec<(PointId, PointId)>,
    /// Extra point at distance `c^2` from everything, present for even `k`.
    pub far_point: Option<PointId>,
}

/// Builds the k-center lower-bound instance on `n` points.
///
/// For odd `k`, `|S| = 3(k-1)/2`, `N` is a random `(k-1)`-subset of `S`
/// perfectly matched at random, and all other points form `O`. Distances are 1
/// on the matching and inside `O`, `c` elsewhere. Even `k` adds one point at
/// distance `c^2` from all others and builds the rest for `k - 1`. The weak
/// oracle reports `c` on the first matched pair that lands in the corruption
/// draw, so the optimum (cost 1) looks like it needs one more center.
pub fn gen_kcenter_lb(k: usize, c: f64, n: usize, seed: u64, delta: f64) -> Result<KCenterLowerBound> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be positive".into()));
    }
    if !(c > 1.0 && c.is_finite()) {
        return Err(Error::InvalidConfig(format!("c must exceed 1, got {c}")));
    }
    let odd_k = if k % 2 == 1 { k } else { k - 1 };
    let far = k.is_multiple_of(2);
    let s_len = 3 * (odd_k - 1) / 2;
    let needed = (s_len + 1 + usize::from(far)).max(2);
    if n < needed {
        return Err(Error::InvalidConfig(format!("n = {n} is too small for k = {k}; need at least {needed}")));
    }
    let mask = CorruptionMask::new(seed, delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Roles are laid out on a shuffled order so indices carry no hint.
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let special: Vec<usize> = order[..s_len].to_vec();
    let far_point = far.then(|| order[n - 1]);
    let mut matched = special.clone();
    matched.shuffle(&mut rng);
    matched.truncate(odd_k - 1);
    let matching: Vec<(usize, usize)> = matched.chunks_exact(2).map(|p| (p[0], p[1])).collect();

    #[derive(Clone, Copy, PartialEq)]
    enum Role {
        Ordinary,
        Special(usize),
        Far,
    }
    let mut role = vec![Role::Ordinary; n];
    for &s in &special {
        role[s] = Role::Special(usize::MAX);
    }
    for (m, &(a, b)) in matching.iter().enumerate() {
        role[a] = Role::Special(m);
        role[b] = Role::Special(m);
    }
    if let Some(f) = far_point {
        role[f] = Role::Far;
    }
    let mut upper = vec![0.0; n * (n - 1) / 2];
    for i in 0..n {
        for j in i + 1..n {
            upper[upper_index(n, i, j)] = match (role[i], role[j]) {
                (Role::Far, _) | (_, Role::Far) => c * c,
                (Role::Ordinary, Role::Ordinary) => 1.0,
                (Role::Special(a), Role::Special(b)) if a == b && a != usize::MAX => 1.0,
                _ => c,
            };
        }
    }
    let truth = GroundTruth::from_table(n, upper)?;

    let hidden = matching.iter().copied().find(|&(a, b)| mask.contains(a, b));
    let (adversary, corrupt) = match hidden {
        Some((a, b)) => (
            Adversary::SinglePair { a: a as u32, b: b as u32, value: c },
            vec![(PointId::from_idx(a.min(b)), PointId::from_idx(a.max(b)))],
        ),
        None => (Adversary::Honest, Vec::new()),
    };
    let meta = LowerBoundMeta {
        kind: "kcenter-lb".into(),
        n,
        seed,
        delta,
        block_size: None,
        blocks: None,
        matched: 2 * matching.len(),
        matched_fraction: if matching.is_empty() { 0.0 } else { 2.0 * matching.len() as f64 / s_len as f64 },
        note: hidden.is_none().then(|| "no matched pair was corrupted; weak oracle is exact".into()),
    };
    let ids = |v: &[usize]| v.iter().map(|&i| PointId::from_idx(i)).collect::<Vec<_>>();
    Ok(KCenterLowerBound {
        instance: ScriptedInstance { truth: Arc::new(truth), mask, adversary: Arc::new(adversary), corrupt, meta },
        c,
        special: ids(&special),
        matching: matching.iter().map(|&(a, b)| (PointId::from_idx(a), PointId::from_idx(b))).collect(),
        far_point: far_point.map(PointId::from_idx),
    })
}

/// Random assignment of `n` points to blocks of `size`.
fn random_blocks(n: usize, size: usize, rng: &mut ChaCha8Rng) -> (Vec<u32>, Vec<Vec<usize>>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut block = vec![0u32; n];
    let members: Vec<Vec<usize>> = order.chunks(size).map(|c| c.to_vec()).collect();
    for (b, m) in members.iter().enumerate() {
        for &p in m {
            block[p] = b as u32;
        }
    }
    (block, members)
}

fn ceil_log2(n: usize) -> f64 {
    (n as f64).log2()
}

/// Block size used by the metric MST family: `ceil(sqrt(log2 n))`.
pub fn metric_block_size(n: usize) -> usize {
    (ceil_log2(n).sqrt().ceil() as usize).max(1)
}

/// Block size used by the point-level family at desk scale:
/// `max(2, ceil(log2 n / 8))`.
pub fn nonmetric_block_size(n: usize) -> usize {
    ((ceil_log2(n) / 8.0).ceil() as usize).max(2)
}

/// MST hard instance with a metric weak oracle.
///
/// Points are split into random blocks of size `ceil(sqrt(log2 n))`; distances
/// are 1 inside a block and the block size across. Block pairs whose cross
/// pairs are all corrupted are matched greedily, and the weak oracle merges
/// each matched pair into one block. The reported distances are again a
/// partition metric.
pub fn gen_mst_metric_lb(n: usize, seed: u64, delta: f64) -> Result<ScriptedInstance> {
    let size = metric_block_size(n);
    if n < 2 || !n.is_multiple_of(size) {
        return Err(Error::InvalidConfig(format!("n = {n} must be at least 2 and divisible by the block size {size}")));
    }
    let mask = CorruptionMask::new(seed, delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (block, members) = random_blocks(n, size, &mut rng);
    let nb = members.len();
    let mut partner = vec![usize::MAX; nb];
    for i in 0..nb {
        if partner[i] != usize::MAX {
            continue;
        }
        for j in i + 1..nb {
            if partner[j] != usize::MAX {
                continue;
            }
            let all = members[i].iter().all(|&a| members[j].iter().all(|&b| mask.contains(a, b)));
            if all {
                partner[i] = j;
                partner[j] = i;
                break;
            }
        }
    }
    let mut merged = block.clone();
    let mut corrupt = Vec::new();
    let mut matched = 0;
    for i in 0..nb {
        let j = partner[i];
        if j == usize::MAX {
            continue;
        }
        matched += 1;
        if j > i {
            for &b in &members[j] {
                merged[b] = i as u32;
            }
            for &a in &members[i] {
                for &b in &members[j] {
                    corrupt.push((PointId::from_idx(a.min(b)), PointId::from_idx(a.max(b))));
                }
            }
        }
    }
    let far = size as f64;
    let truth = GroundTruth::from_partition(block, 1.0, far.max(1.0))?;
    let adversary = Adversary::Partition { group: merged.into(), near: 1.0, far: truth.aspect_ratio() };
    let meta = LowerBoundMeta {
        kind: "mst-metric-lb".into(),
        n,
        seed,
        delta,
        block_size: Some(size),
        blocks: Some(nb),
        matched,
        matched_fraction: matched as f64 / nb as f64,
        note: None,
    };
    Ok(ScriptedInstance { truth: Arc::new(truth), mask, adversary: Arc::new(adversary), corrupt, meta })
}

/// MST hard instance with a non-metric weak oracle.
///
/// Blocks of size `max(2, ceil(log2 n / 8))` (a desk-scale stand-in for the
/// asymptotic block size). A point `x` is matched to a point `y` of another
/// block when `x` is corrupted against all of `y`'s block and `y` against all
/// of `x`'s; the weak oracle then reports distance 1 on those pairs, which
/// breaks the triangle inequality.
pub fn gen_mst_nonmetric_lb(n: usize, seed: u64, delta: f64) -> Result<ScriptedInstance> {
    gen_mst_nonmetric_lb_with_block(n, nonmetric_block_size(n), seed, delta)
}

/// The point-level family with an explicit block size. With blocks of size 2
/// the far distance is 2 and the weak view cannot violate the triangle
/// inequality; sizes of 3 and up can.
pub fn gen_mst_nonmetric_lb_with_block(n: usize, size: usize, seed: u64, delta: f64) -> Result<ScriptedInstance> {
    if size < 2 {
        return Err(Error::InvalidConfig("block size must be at least 2".into()));
    }
    if n < 2 || !n.is_multiple_of(size) {
        return Err(Error::InvalidConfig(format!("n = {n} must be at least 2 and divisible by the block size {size}")));
    }
    let mask = CorruptionMask::new(seed, delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (block, members) = random_blocks(n, size, &mut rng);
    let mut partner = vec![UNMATCHED; n];
    for x in 0..n {
        if partner[x] != UNMATCHED {
            continue;
        }
        let bx = block[x] as usize;
        for y in x + 1..n {
            let by = block[y] as usize;
            if partner[y] != UNMATCHED || by == bx {
                continue;
            }
            let ok = members[by].iter().all(|&u| mask.contains(x, u)) && members[bx].iter().all(|&v| mask.contains(v, y));
            if ok {
                partner[x] = y as u32;
                partner[y] = x as u32;
                break;
            }
        }
    }
    let mut corrupt = Vec::new();
    let mut matched = 0;
    for x in 0..n {
        let y = partner[x];
        if y == UNMATCHED {
            continue;
        }
        matched += 1;
        let y = y as usize;
        if y > x {
            let mut pairs: Vec<(usize, usize)> = members[block[y] as usize]
                .iter()
                .map(|&u| (x, u))
                .chain(members[block[x] as usize].iter().map(|&v| (v, y)))
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            pairs.sort_unstable();
            pairs.dedup();
            corrupt.extend(pairs.into_iter().map(|(a, b)| (PointId::from_idx(a), PointId::from_idx(b))));
        }
    }
    let truth = GroundTruth::from_partition(block.clone(), 1.0, size as f64)?;
    let adversary = Adversary::MatchedPoints { block: block.into(), partner: partner.into(), near: 1.0 };
    let meta = LowerBoundMeta {
        kind: "mst-nonmetric-lb".into(),
        n,
        seed,
        delta,
        block_size: Some(size),
        blocks: Some(members.len()),
        matched,
        matched_fraction: matched as f64 / n as f64,
        note: Some("block size is a desk-scale stand-in".into()),
    };
    Ok(ScriptedInstance { truth: Arc::new(truth), mask, adversary: Arc::new(adversary), corrupt, meta })
}
