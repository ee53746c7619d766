//! Metric MST from the weak oracle alone: make distances unique, take the
//! exact MST of the reported distances, and cap its degree.
//!
//! The heavy-ball carving here is an analysis aid that lower-bounds the true
//! MST weight; tests use it against the true metric.

mod carving;
mod transform;
mod tree;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::keyed::{keyed, pair_hash, salt, unit};
use crate::oracle::{Distances, Evaluator, LedgerSnapshot, OracleSet, PointId, WeakDistances};

pub use carving::{heavy_carving, heavy_radii, HeavyCarving};
pub use transform::{bounded_degree_transform, phi};
pub use tree::SpanningTree;

/// Distances shifted by a keyed per-pair amount in `[eps/2, eps]`.
///
/// Comparisons use the pair `(base, shift)` lexicographically, which is the
/// order the shifted values take for any small enough `eps` and stays exact
/// even when `eps` is below the floating-point resolution of `base`.
pub struct Perturbed<D> {
    inner: D,
    eps: f64,
    seed: u64,
}

/// `inner` with unique distances. The shift of each pair is drawn once from a
/// keyed hash of the pair, so repeated reads agree.
pub fn perturb_unique<D: Distances>(inner: D, eps: f64, seed: u64) -> Perturbed<D> {
    Perturbed { inner, eps, seed }
}

impl<D: Distances> Perturbed<D> {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Shift of the pair `{i, j}`, in `[eps/2, eps]`.
    pub fn shift(&self, i: usize, j: usize) -> f64 {
        self.eps * (0.5 + 0.5 * unit(pair_hash(self.seed, salt::PERTURB, i, j)))
    }

    pub fn inner(&self) -> &D {
        &self.inner
    }
}

impl<D: Distances> Distances for Perturbed<D> {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        self.inner.dist(i, j) + self.shift(i, j)
    }
}

/// Prim's algorithm over an `n`-point complete graph. `row(u, vs, out)` fills
/// the keys of the edges `u - vs[t]`. Every unordered pair is read once, when
/// the first of its endpoints joins the tree. Ties keep the earlier edge.
fn prim<K: PartialOrd + Copy>(n: usize, mut row: impl FnMut(usize, &[usize], &mut Vec<K>)) -> (SpanningTree, Vec<Option<K>>) {
    let mut parent: Vec<Option<PointId>> = vec![None; n];
    let mut key: Vec<Option<K>> = vec![None; n];
    let mut outside: Vec<usize> = (1..n).collect();
    let mut buf = Vec::with_capacity(n);
    let mut u = 0;
    while !outside.is_empty() {
        row(u, &outside, &mut buf);
        let mut best = 0;
        for (t, &v) in outside.iter().enumerate() {
            let k = buf[t];
            if key[v].is_none_or(|cur| k < cur) {
                key[v] = Some(k);
                parent[v] = Some(PointId::from_idx(u));
            }
            if key[v] < key[outside[best]] {
                best = t;
            }
        }
        u = outside.swap_remove(best);
    }
    let tree = SpanningTree::from_parents(PointId(0), parent).expect("Prim builds a spanning tree");
    (tree, key)
}

/// Exact minimum spanning tree by Prim's algorithm, rooted at point 0.
/// `O(n^2)` time, `O(n)` memory, one read per pair.
pub fn mst_dense(d: &impl Distances) -> SpanningTree {
    prim(d.len().max(1), |u, vs, out| d.dist_row(u, vs, out)).0
}

/// [`mst_dense`] under the lexicographic order of a perturbed accessor.
pub fn mst_dense_perturbed<D: Distances>(p: &Perturbed<D>) -> (SpanningTree, Vec<Option<(f64, f64)>>) {
    let mut base = Vec::new();
    prim(p.len().max(1), |u, vs, out: &mut Vec<(f64, f64)>| {
        p.inner.dist_row(u, vs, &mut base);
        out.clear();
        out.extend(vs.iter().zip(&base).map(|(&v, &b)| (b, p.shift(u, v))));
    })
}

/// Result of checking sampled triangles of a distance function.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct MetricCheck {
    pub triangles: usize,
    pub violations: usize,
    /// Largest `d(a,c) / (d(a,b) + d(b,c))` seen.
    pub worst_ratio: f64,
}

impl MetricCheck {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks all three inequalities of `count` random triangles.
pub fn validate_metric(d: &impl Distances, count: usize, seed: u64) -> MetricCheck {
    let n = d.len();
    let mut check = MetricCheck::default();
    if n < 3 {
        return check;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(keyed(seed, salt::VALIDATE));
    for _ in 0..count {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let c = rng.gen_range(0..n);
        if a == b || b == c || a == c {
            continue;
        }
        let (ab, bc, ac) = (d.dist(a, b), d.dist(b, c), d.dist(a, c));
        check.triangles += 1;
        for (long, x, y) in [(ac, ab, bc), (ab, ac, bc), (bc, ab, ac)] {
            let ratio = long / (x + y);
            check.worst_ratio = check.worst_ratio.max(ratio);
            if long > (x + y) * (1.0 + 1e-9) {
                check.violations += 1;
            }
        }
    }
    check
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MstConfig {
    /// Seed of the tie-breaking shifts and of triangle sampling.
    pub seed: u64,
    /// Perturbation scale; `None` picks `1 / n^4`, which is below
    /// `min d~ / n^3` whenever reported distances are at least 1/n.
    pub eps: Option<f64>,
    /// Triangles sampled before the run; 0 skips the check.
    pub validate_triangles: usize,
}

impl Default for MstConfig {
    fn default() -> Self {
        Self { seed: 0, eps: None, validate_triangles: 100_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MstSolution {
    /// Degree-capped tree, the algorithm's output.
    pub tree: SpanningTree,
    /// MST of the perturbed weak distances, before the transform.
    pub weak_mst: SpanningTree,
    /// Weight of `weak_mst` under the weak distances (read during Prim).
    pub weak_mst_weight: f64,
    pub eps: f64,
    /// Queries spent building the tree.
    pub construction: LedgerSnapshot,
    /// Sampled triangle check of the weak distances and its query cost.
    pub validation: Option<(MetricCheck, LedgerSnapshot)>,
    pub warnings: Vec<String>,
}

impl MstSolution {
    pub fn true_weight(&self, eval: &Evaluator<'_>) -> f64 {
        self.tree.weight(eval)
    }
}

/// The query-free MST algorithm: uses the weak oracle only.
///
/// The guarantee assumes the weak distances form a metric. That is checked on
/// sampled triangles first; a failure is reported as a warning and the
/// algorithm still runs.
pub fn mst_weak_solve(oracles: &OracleSet, cfg: &MstConfig) -> Result<MstSolution> {
    let n = oracles.n();
    let weak = WeakDistances(&oracles.weak);
    let mut warnings = Vec::new();
    if !oracles.weak.adversary().is_metric_preserving() {
        warnings.push(format!(
            "corruption policy {:?} does not keep the weak distances a metric; the approximation guarantee does not apply",
            oracles.weak.adversary().name()
        ));
    }
    let validation = (cfg.validate_triangles > 0).then(|| {
        let before = oracles.snapshot();
        let check = validate_metric(&weak, cfg.validate_triangles, cfg.seed);
        (check, oracles.snapshot().since(&before))
    });
    if let Some((check, _)) = &validation {
        if !check.passed() {
            warnings.push(format!(
                "{} of {} sampled triangles violate the triangle inequality (worst ratio {:.3})",
                check.violations, check.triangles, check.worst_ratio
            ));
        }
    }

    let before = oracles.snapshot();
    let eps = cfg.eps.unwrap_or(1.0 / (n as f64).powi(4));
    let perturbed = perturb_unique(weak, eps, cfg.seed);
    let (weak_mst, keys) = mst_dense_perturbed(&perturbed);
    let weak_mst_weight = keys.iter().flatten().map(|k| k.0).sum();
    // children are ordered by the keys read during Prim, so the transform
    // costs no further queries
    let tree = transform::transform_by(&weak_mst, |_, c| keys[c.idx()].expect("non-root has a key"));
    let construction = oracles.snapshot().since(&before);
    Ok(MstSolution { tree, weak_mst, weak_mst_weight, eps, construction, validation, warnings })
}
