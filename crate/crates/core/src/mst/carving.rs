use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{Distances, PointId};

/// Level-`l` heavy ball carving of the whole point set.
#[derive(Clone, Debug, Serialize)]
pub struct HeavyCarving {
    pub level: u32,
    pub centers: Vec<PointId>,
    /// Nonincreasing.
    pub radii: Vec<f64>,
    /// Partition of all points; `cells[i]` holds `centers[i]`.
    pub cells: Vec<Vec<PointId>>,
}

impl HeavyCarving {
    pub fn radius_sum(&self) -> f64 {
        self.radii.iter().sum()
    }
}

/// Level-`l` heavy radius of every point: the distance to its `2^l`-th
/// closest point, counting the point itself. With distinct distances the
/// closed ball of that radius holds exactly `2^l` points.
pub fn heavy_radii(d: &impl Distances, level: u32) -> Result<Vec<f64>> {
    let n = d.len();
    let size = 1usize.checked_shl(level).filter(|&s| s <= n).ok_or(Error::InvalidConfig(format!(
        "2^{level} exceeds the {n} points"
    )))?;
    let mut row = Vec::with_capacity(n);
    Ok((0..n)
        .map(|v| {
            if size == 1 {
                return 0.0;
            }
            row.clear();
            row.extend((0..n).filter(|&u| u != v).map(|u| d.dist(v, u)));
            let (_, r, _) = row.select_nth_unstable_by(size - 2, f64::total_cmp);
            *r
        })
        .collect())
}

/// Greedy carving: repeatedly take the remaining point with the largest heavy
/// radius (ties by index), and carve its heavy ball out of what remains.
///
/// Reads the metric it is given; it is an analysis tool, used against the
/// true metric to lower-bound MST weight, and not part of any algorithm.
pub fn heavy_carving(d: &impl Distances, level: u32) -> Result<HeavyCarving> {
    let n = d.len();
    let radii_all = heavy_radii(d, level)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| radii_all[b].total_cmp(&radii_all[a]).then(a.cmp(&b)));
    let mut alive = vec![true; n];
    let mut out = HeavyCarving { level, centers: Vec::new(), radii: Vec::new(), cells: Vec::new() };
    for &x in &order {
        if !alive[x] {
            continue;
        }
        let r = radii_all[x];
        let cell: Vec<PointId> =
            (0..n).filter(|&y| alive[y] && (y == x || d.dist(x, y) <= r)).map(PointId::from_idx).collect();
        for y in &cell {
            alive[y.idx()] = false;
        }
        out.centers.push(PointId::from_idx(x));
        out.radii.push(r);
        out.cells.push(cell);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::DistanceMatrix;

    fn grid(side: usize) -> DistanceMatrix {
        DistanceMatrix::from_fn(side * side, |a, b| {
            let (ax, ay) = ((a % side) as f64, (a / side) as f64);
            let (bx, by) = ((b % side) as f64, (b / side) as f64);
            ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt()
        })
    }

    #[test]
    fn level_zero_is_singletons() {
        let d = grid(4);
        let c = heavy_carving(&d, 0).unwrap();
        assert_eq!(c.centers.len(), 16);
        assert!(c.radii.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn grid_radii_are_fourth_nearest() {
        let d = grid(5);
        let r = heavy_radii(&d, 2).unwrap();
        for v in 0..25 {
            let mut all: Vec<f64> = (0..25).map(|u| d.dist(v, u)).collect();
            all.sort_by(f64::total_cmp);
            assert_eq!(r[v], all[3]);
        }
    }

    #[test]
    fn cells_partition_and_radii_nonincreasing() {
        let d = grid(6);
        for level in 0..=5 {
            let c = heavy_carving(&d, level).unwrap();
            let mut seen: Vec<PointId> = c.cells.concat();
            seen.sort();
            assert_eq!(seen, (0..36).map(PointId::from_idx).collect::<Vec<_>>());
            assert!(c.radii.windows(2).all(|w| w[0] >= w[1]));
        }
        assert!(heavy_carving(&d, 6).is_err());
    }
}
