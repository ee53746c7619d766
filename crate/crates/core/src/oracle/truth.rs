use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Exhaustive triangle checks up to this many points; sampled beyond.
const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 300;
const SAMPLED_TRIANGLES: usize = 100_000;

/// The hidden metric space oracles answer from.
///
/// Distances are normalized on construction so the smallest nonzero distance
/// is 1, which makes `aspect_ratio` the largest distance.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    repr: Repr,
    aspect_ratio: f64,
    scale: f64,
}

#[derive(Clone, Debug)]
enum Repr {
    /// Euclidean points, row-major `n * dim`.
    Coords { dim: usize, data: Vec<f64> },
    /// Packed strict upper triangle, row-major.
    Table { n: usize, upper: Vec<f64> },
    /// `near` within a group, `far` across groups.
    Partition { group: Vec<u32>, near: f64, far: f64 },
}

#[inline]
pub(crate) fn upper_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl GroundTruth {
    /// Euclidean metric over `data.len() / dim` points.
    pub fn from_points(dim: usize, mut data: Vec<f64>) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidMetric(format!(
                "{} coordinates do not split into rows of dimension {dim}",
                data.len()
            )));
        }
        let n = data.len() / dim;
        if n < 2 {
            return Err(Error::Empty("need at least two points"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMetric("non-finite coordinate".into()));
        }
        let (min, max) = extreme_distances(n, |i, j| euclid(&data[i * dim..(i + 1) * dim], &data[j * dim..(j + 1) * dim]));
        if max == 0.0 {
            return Err(Error::InvalidMetric("all points coincide".into()));
        }
        let scale = 1.0 / min;
        data.iter_mut().for_each(|v| *v *= scale);
        Ok(Self { repr: Repr::Coords { dim, data }, aspect_ratio: max / min, scale })
    }

    /// Metric given as a packed strict upper triangle of `n(n-1)/2` entries.
    ///
    /// Validates nonnegativity and the triangle inequality (exhaustively for
    /// small `n`, on sampled triangles otherwise).
    pub fn from_table(n: usize, mut upper: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Empty("need at least two points"));
        }
        if upper.len() != n * (n - 1) / 2 {
            return Err(Error::InvalidMetric(format!(
                "expected {} upper-triangle entries, got {}",
                n * (n - 1) / 2,
                upper.len()
            )));
        }
        if let Some(v) = upper.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidMetric(format!("bad distance {v}")));
        }
        let at = |i: usize, j: usize| match i.cmp(&j) {
            std::cmp::Ordering::Less => upper[upper_index(n, i, j)],
            std::cmp::Ordering::Greater => upper[upper_index(n, j, i)],
            std::cmp::Ordering::Equal => 0.0,
        };
        check_triangles(n, at)?;
        let min = upper.iter().copied().filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min);
        let max = upper.iter().copied().fold(0.0, f64::max);
        if max == 0.0 {
            return Err(Error::InvalidMetric("all distances are zero".into()));
        }
        let scale = 1.0 / min;
        upper.iter_mut().for_each(|v| *v *= scale);
        Ok(Self { repr: Repr::Table { n, upper }, aspect_ratio: max / min, scale })
    }

    /// Partition metric: `near` inside a group, `far` between groups.
    pub fn from_partition(group: Vec<u32>, near: f64, far: f64) -> Result<Self> {
        if group.len() < 2 {
            return Err(Error::Empty("need at least two points"));
        }
        if !(near > 0.0 && far >= near && far.is_finite()) {
            return Err(Error::InvalidMetric(format!("partition metric needs 0 < near <= far, got {near}, {far}")));
        }
        let scale = 1.0 / near;
        Ok(Self {
            repr: Repr::Partition { group, near: 1.0, far: far * scale },
            aspect_ratio: far / near,
            scale,
        })
    }

    pub fn n(&self) -> usize {
        match &self.repr {
            Repr::Coords { dim, data } => data.len() / dim,
            Repr::Table { n, .. } => *n,
            Repr::Partition { group, .. } => group.len(),
        }
    }

    /// Largest distance after normalization (smallest nonzero distance is 1).
    pub fn aspect_ratio(&self) -> f64 {
        self.aspect_ratio
    }

    /// Factor applied to the raw input distances by normalization.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.repr {
            Repr::Coords { dim, .. } => Some(*dim),
            _ => None,
        }
    }

    #[inline]
    pub(crate) fn distance(&self, i: usize, j: usize) -> f64 {
        match &self.repr {
            Repr::Coords { dim, data } => euclid(&data[i * dim..(i + 1) * dim], &data[j * dim..(j + 1) * dim]),
            Repr::Table { n, upper } => match i.cmp(&j) {
                std::cmp::Ordering::Less => upper[upper_index(*n, i, j)],
                std::cmp::Ordering::Greater => upper[upper_index(*n, j, i)],
                std::cmp::Ordering::Equal => 0.0,
            },
            Repr::Partition { group, near, far } => {
                if i == j {
                    0.0
                } else if group[i] == group[j] {
                    *near
                } else {
                    *far
                }
            }
        }
    }

    pub(crate) fn coords(&self, i: usize) -> Option<&[f64]> {
        match &self.repr {
            Repr::Coords { dim, data } => Some(&data[i * dim..(i + 1) * dim]),
            _ => None,
        }
    }

    /// Packed strict upper triangle of all distances (normalized units).
    #[cfg(test)]
    pub(crate) fn upper_triangle(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.distance(i, j));
            }
        }
        out
    }
}

#[inline]
pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Smallest nonzero and largest pairwise distance.
fn extreme_distances(n: usize, d: impl Fn(usize, usize) -> f64) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let v = d(i, j);
            if v > 0.0 && v < min {
                min = v;
            }
            max = max.max(v);
        }
    }
    (min, max)
}

fn check_triangles(n: usize, d: impl Fn(usize, usize) -> f64) -> Result<()> {
    let tol = |a: f64, b: f64| 1e-9 * (1.0 + a.abs() + b.abs());
    let check = |x: usize, y: usize, z: usize| -> Result<()> {
        let (xy, yz, xz) = (d(x, y), d(y, z), d(x, z));
        if xz > xy + yz + tol(xy, yz) {
            return Err(Error::InvalidMetric(format!(
                "triangle inequality fails: d({x},{z}) = {xz} > d({x},{y}) + d({y},{z}) = {}",
                xy + yz
            )));
        }
        Ok(())
    };
    if n <= EXHAUSTIVE_TRIANGLE_LIMIT {
        for x in 0..n {
            for y in 0..n {
                for z in x + 1..n {
                    if y != x && y != z {
                        check(x, y, z)?;
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7472_6961);
        for _ in 0..SAMPLED_TRIANGLES {
            let (x, y, z) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if x != y && y != z && x != z {
                check(x, y, z)?;
            }
        }
    }
    Ok(())
}
