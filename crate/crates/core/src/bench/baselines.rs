use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::oracle::{Evaluator, OracleSet, PointId};

/// Which oracle a baseline may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineMode {
    /// Only weak queries; scored on the true metric all the same.
    WeakOnly,
    /// Every point revealed by the strong oracle up front.
    StrongFull,
}

impl BaselineMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BaselineMode::WeakOnly => "weak",
            BaselineMode::StrongFull => "strong",
        }
    }
}

/// Centers and an assignment. When `centroids` is set (Lloyd ran on revealed
/// coordinates), `label[p]` indexes it and cost is taken to the centroids.
#[derive(Clone, Debug, Serialize)]
pub struct Clustering {
    pub centers: Vec<PointId>,
    pub assignment: Vec<PointId>,
    pub centroids: Option<Vec<Vec<f64>>>,
    pub label: Vec<usize>,
}

impl Clustering {
    fn from_centers(centers: Vec<PointId>, label: Vec<usize>) -> Self {
        let assignment = label.iter().map(|&l| centers[l]).collect();
        Self { centers, assignment, centroids: None, label }
    }

    pub fn kcenter_cost(&self, eval: &Evaluator<'_>) -> f64 {
        match &self.centroids {
            None => eval.kcenter_cost(&self.assignment),
            Some(c) => self.centroid_costs(eval, c).fold(0.0, f64::max),
        }
    }

    /// `sum_p d(p, center(p))^q`.
    pub fn sum_cost(&self, eval: &Evaluator<'_>, q: u32) -> f64 {
        match &self.centroids {
            None => eval.sum_cost(&self.assignment, q),
            Some(c) => self.centroid_costs(eval, c).map(|d| d.powi(q as i32)).sum(),
        }
    }

    fn centroid_costs<'a>(&'a self, eval: &'a Evaluator<'_>, c: &'a [Vec<f64>]) -> impl Iterator<Item = f64> + 'a {
        self.label.iter().enumerate().map(move |(p, &l)| {
            let x = eval.coords(PointId::from_idx(p)).expect("centroids exist only for coordinate instances");
            x.iter().zip(&c[l]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
        })
    }
}

/// Distance rows `x -> all points` through the allowed oracle.
struct Access<'a> {
    oracles: &'a OracleSet,
    mode: BaselineMode,
    all: Vec<PointId>,
}

impl<'a> Access<'a> {
    fn new(oracles: &'a OracleSet, mode: BaselineMode) -> Result<Self> {
        let all: Vec<PointId> = (0..oracles.n()).map(PointId::from_idx).collect();
        if mode == BaselineMode::StrongFull {
            for &p in &all {
                oracles.strong.point_query(p)?;
            }
        }
        Ok(Self { oracles, mode, all })
    }

    /// `out[p] = dist(x, p)`, zero at `x`.
    fn row(&self, x: PointId, out: &mut Vec<f64>) -> Result<()> {
        match self.mode {
            BaselineMode::StrongFull => {
                out.clear();
                for &p in &self.all {
                    out.push(self.oracles.strong.distance(x, p)?);
                }
            }
            BaselineMode::WeakOnly => {
                let others: Vec<PointId> = self.all.iter().copied().filter(|&p| p != x).collect();
                let mut vals = Vec::new();
                self.oracles.weak.query_many(x, &others, &mut vals)?;
                out.clear();
                out.extend_from_slice(&vals[..x.idx()]);
                out.push(0.0);
                out.extend_from_slice(&vals[x.idx()..]);
            }
        }
        Ok(())
    }

    /// Nearest center per point, from the rows of the centers.
    fn assign(&self, centers: &[PointId]) -> Result<Vec<usize>> {
        let n = self.all.len();
        let mut best = vec![(f64::INFINITY, 0usize); n];
        let mut row = Vec::new();
        for (t, &c) in centers.iter().enumerate() {
            self.row(c, &mut row)?;
            for p in 0..n {
                if row[p] < best[p].0 {
                    best[p] = (row[p], t);
                }
            }
        }
        for (t, &c) in centers.iter().enumerate() {
            best[c.idx()] = (0.0, t);
        }
        Ok(best.into_iter().map(|b| b.1).collect())
    }
}

/// Gonzalez farthest-first traversal from a seeded start point.
pub fn baseline_farthest_first(oracles: &OracleSet, mode: BaselineMode, k: usize, seed: u64) -> Result<Clustering> {
    let n = oracles.n();
    let access = Access::new(oracles, mode)?;
    if k >= n {
        return Ok(Clustering::from_centers(access.all.clone(), (0..n).collect()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = vec![PointId::from_idx(rng.gen_range(0..n))];
    let mut near = vec![f64::INFINITY; n];
    let mut row = Vec::new();
    loop {
        access.row(*centers.last().expect("nonempty"), &mut row)?;
        for p in 0..n {
            near[p] = near[p].min(row[p]);
        }
        if centers.len() == k {
            break;
        }
        let far = (0..n).max_by(|&a, &b| near[a].total_cmp(&near[b]).then(b.cmp(&a))).expect("n > 0");
        centers.push(PointId::from_idx(far));
    }
    let label = access.assign(&centers)?;
    Ok(Clustering::from_centers(centers, label))
}

/// k-means++ (`q = 2`) or k-median++ (`q = 1`) seeding; in strong mode
/// followed by Lloyd iterations on the revealed coordinates when the instance
/// has them.
pub fn baseline_kmeanspp(
    oracles: &OracleSet,
    mode: BaselineMode,
    k: usize,
    q: u32,
    seed: u64,
    lloyd_iters: usize,
) -> Result<Clustering> {
    let n = oracles.n();
    let access = Access::new(oracles, mode)?;
    if k >= n {
        return Ok(Clustering::from_centers(access.all.clone(), (0..n).collect()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = vec![PointId::from_idx(rng.gen_range(0..n))];
    let mut near = vec![f64::INFINITY; n];
    let mut row = Vec::new();
    loop {
        access.row(*centers.last().expect("nonempty"), &mut row)?;
        for p in 0..n {
            near[p] = near[p].min(row[p].powi(q as i32));
        }
        if centers.len() == k {
            break;
        }
        let next = match WeightedIndex::new(&near) {
            Ok(w) => w.sample(&mut rng),
            Err(_) => (0..n).find(|&p| !centers.contains(&PointId::from_idx(p))).expect("k < n"),
        };
        centers.push(PointId::from_idx(next));
    }
    let label = access.assign(&centers)?;
    let mut out = Clustering::from_centers(centers, label);
    if mode == BaselineMode::StrongFull && lloyd_iters > 0 && oracles.strong.coordinates(PointId(0)).is_ok() {
        lloyd(oracles, &mut out, lloyd_iters)?;
    }
    Ok(out)
}

fn lloyd(oracles: &OracleSet, c: &mut Clustering, iters: usize) -> Result<()> {
    let n = oracles.n();
    let k = c.centers.len();
    let coords: Vec<&[f64]> = (0..n).map(|p| oracles.strong.coordinates(PointId::from_idx(p))).collect::<Result<_>>()?;
    let dim = coords[0].len();
    let mut cent: Vec<Vec<f64>> = c.centers.iter().map(|p| coords[p.idx()].to_vec()).collect();
    let sq = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let mut label = c.label.clone();
    for _ in 0..iters {
        let mut sum = vec![vec![0.0; dim]; k];
        let mut count = vec![0usize; k];
        for p in 0..n {
            count[label[p]] += 1;
            for (s, x) in sum[label[p]].iter_mut().zip(coords[p]) {
                *s += x;
            }
        }
        for t in 0..k {
            if count[t] > 0 {
                cent[t] = sum[t].iter().map(|s| s / count[t] as f64).collect();
            }
        }
        let mut changed = false;
        for p in 0..n {
            let best = (0..k).min_by(|&a, &b| sq(coords[p], &cent[a]).total_cmp(&sq(coords[p], &cent[b]))).expect("k > 0");
            if best != label[p] {
                label[p] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // final centroids of the final labels
    let mut sum = vec![vec![0.0; dim]; k];
    let mut count = vec![0usize; k];
    for p in 0..n {
        count[label[p]] += 1;
        for (s, x) in sum[label[p]].iter_mut().zip(coords[p]) {
            *s += x;
        }
    }
    for t in 0..k {
        if count[t] > 0 {
            cent[t] = sum[t].iter().map(|s| s / count[t] as f64).collect();
        }
    }
    c.label = label;
    c.centroids = Some(cent);
    Ok(())
}
