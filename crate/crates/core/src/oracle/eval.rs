use super::{GroundTruth, PointId, WeakOracle};

/// Symmetric distance function over `0..len()` with zero diagonal.
pub trait Distances: Sync {
    fn len(&self) -> usize;

    fn dist(&self, i: usize, j: usize) -> f64;

    /// `out[t] = dist(i, js[t])`. Implementations may batch the work.
    fn dist_row(&self, i: usize, js: &[usize], out: &mut Vec<f64>) {
        out.clear();
        out.extend(js.iter().map(|&j| self.dist(i, j)));
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Uncounted access to the true metric, for scoring solutions and for tests.
///
/// Algorithms never receive one of these.
#[derive(Clone, Copy)]
pub struct Evaluator<'a> {
    truth: &'a GroundTruth,
}

impl<'a> Evaluator<'a> {
    pub fn new(truth: &'a GroundTruth) -> Self {
        Self { truth }
    }

    pub fn distance(&self, x: PointId, y: PointId) -> f64 {
        self.truth.distance(x.idx(), y.idx())
    }

    pub fn coords(&self, x: PointId) -> Option<&'a [f64]> {
        self.truth.coords(x.idx())
    }

    /// `max_p d(p, center(p))`.
    pub fn kcenter_cost(&self, assignment: &[PointId]) -> f64 {
        assignment
            .iter()
            .enumerate()
            .map(|(p, &c)| self.truth.distance(p, c.idx()))
            .fold(0.0, f64::max)
    }

    /// `sum_p d(p, center(p))^q`.
    pub fn sum_cost(&self, assignment: &[PointId], q: u32) -> f64 {
        assignment
            .iter()
            .enumerate()
            .map(|(p, &c)| self.truth.distance(p, c.idx()).powi(q as i32))
            .sum()
    }

    /// `max_p min_c d(p, c)`, the k-center cost under the best assignment.
    pub fn kcenter_cost_nearest(&self, centers: &[PointId]) -> f64 {
        (0..self.truth.n())
            .map(|p| {
                centers
                    .iter()
                    .map(|c| self.truth.distance(p, c.idx()))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

impl Distances for Evaluator<'_> {
    fn len(&self) -> usize {
        self.truth.n()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.truth.distance(i, j)
    }
}

/// Weak oracle viewed as a distance function; every off-diagonal call is a
/// counted weak query.
pub struct WeakDistances<'a>(pub &'a WeakOracle);

impl Distances for WeakDistances<'_> {
    fn len(&self) -> usize {
        self.0.n()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        self.0
            .query(PointId::from_idx(i), PointId::from_idx(j))
            .expect("indices are in range and distinct")
    }

    fn dist_row(&self, i: usize, js: &[usize], out: &mut Vec<f64>) {
        debug_assert!(!js.contains(&i));
        let ids: Vec<PointId> = js.iter().map(|&j| PointId::from_idx(j)).collect();
        self.0.query_many(PointId::from_idx(i), &ids, out).expect("indices are in range and distinct");
    }
}

impl<D: Distances + ?Sized> Distances for &D {
    fn len(&self) -> usize {
        (**self).len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        (**self).dist(i, j)
    }

    fn dist_row(&self, i: usize, js: &[usize], out: &mut Vec<f64>) {
        (**self).dist_row(i, js, out)
    }
}

/// Dense symmetric matrix, for small instances and tests.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds the matrix from `f(i, j)` for `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    /// Copies any distance function into memory.
    pub fn collect(d: &impl Distances) -> Self {
        Self::from_fn(d.len(), |i, j| d.dist(i, j))
    }
}

impl Distances for DistanceMatrix {
    fn len(&self) -> usize {
        self.n
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}
