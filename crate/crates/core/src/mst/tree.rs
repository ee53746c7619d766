use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{Distances, PointId};

/// Rooted spanning tree stored as a parent array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanningTree {
    root: PointId,
    parent: Vec<Option<PointId>>,
}

impl SpanningTree {
    /// Validates that `parent` describes a tree rooted at `root` spanning all
    /// indices.
    pub fn from_parents(root: PointId, parent: Vec<Option<PointId>>) -> Result<Self> {
        let n = parent.len();
        if root.idx() >= n {
            return Err(Error::OutOfRange(root, n));
        }
        if parent[root.idx()].is_some() {
            return Err(Error::InvalidConfig("the root cannot have a parent".into()));
        }
        for (i, p) in parent.iter().enumerate() {
            match p {
                None if i != root.idx() => {
                    return Err(Error::InvalidConfig(format!("point {i} has no parent")));
                }
                Some(p) if p.idx() >= n => return Err(Error::OutOfRange(*p, n)),
                _ => {}
            }
        }
        let tree = Self { root, parent };
        // every node must reach the root; depth memo keeps this linear
        let mut state = vec![0u8; n]; // 0 unseen, 1 on stack, 2 reaches root
        state[root.idx()] = 2;
        for start in 0..n {
            let mut path = Vec::new();
            let mut v = start;
            while state[v] == 0 {
                state[v] = 1;
                path.push(v);
                v = tree.parent[v].expect("non-root has a parent").idx();
            }
            if state[v] == 1 {
                return Err(Error::InvalidConfig(format!("parent array has a cycle through {v}")));
            }
            for p in path {
                state[p] = 2;
            }
        }
        Ok(tree)
    }

    pub fn single(n: usize) -> Self {
        assert!(n >= 1);
        let mut parent = vec![Some(PointId(0)); n];
        parent[0] = None;
        Self { root: PointId(0), parent }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> PointId {
        self.root
    }

    pub fn parent(&self, x: PointId) -> Option<PointId> {
        self.parent[x.idx()]
    }

    pub fn parents(&self) -> &[Option<PointId>] {
        &self.parent
    }

    /// `(child, parent)` for every non-root node, in child order.
    pub fn edges(&self) -> Vec<(PointId, PointId)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (PointId::from_idx(c), p)))
            .collect()
    }

    /// Children lists in increasing index order.
    pub fn children(&self) -> Vec<Vec<PointId>> {
        let mut out = vec![Vec::new(); self.n()];
        for (c, p) in self.edges() {
            out[p.idx()].push(c);
        }
        out
    }

    /// Undirected degree of every node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n()];
        for (c, p) in self.edges() {
            deg[c.idx()] += 1;
            deg[p.idx()] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn weight(&self, d: &impl Distances) -> f64 {
        self.edges().iter().map(|&(c, p)| d.dist(c.idx(), p.idx())).sum()
    }

    /// The same tree as an undirected edge set, each pair as `(min, max)`,
    /// sorted. Two trees are equal as graphs iff these agree.
    pub fn canonical_edges(&self) -> Vec<(PointId, PointId)> {
        let mut e: Vec<_> = self.edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        e.sort_unstable();
        e
    }
}
