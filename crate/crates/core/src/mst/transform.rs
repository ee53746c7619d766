use std::cmp::Ordering;

use super::SpanningTree;
use crate::oracle::{Distances, PointId};

/// Parent slot of child `i` (1-based) in the level-order complete binary tree.
#[inline]
pub fn phi(i: usize) -> usize {
    i.div_ceil(2) - 1
}

/// Caps the degree at 5 while at most doubling the weight.
///
/// For each node with more than two children, the children are ordered by
/// distance to the node (ties by index) and child `i` is re-hung below
/// `x_{phi(i)}`, with `x_0` the node itself.
pub fn bounded_degree_transform(tree: &SpanningTree, d: &impl Distances) -> SpanningTree {
    transform_by(tree, |parent, child| (d.dist(parent.idx(), child.idx()), 0.0))
}

/// Transform with children ordered by an arbitrary key of the `(parent,
/// child)` edge. Used with keys cached from the tree's construction so no
/// distance is asked for twice.
pub(crate) fn transform_by(tree: &SpanningTree, key: impl Fn(PointId, PointId) -> (f64, f64)) -> SpanningTree {
    let mut parent = tree.parents().to_vec();
    for (u, kids) in tree.children().into_iter().enumerate() {
        if kids.len() <= 2 {
            continue;
        }
        let u = PointId::from_idx(u);
        let mut keyed: Vec<((f64, f64), PointId)> = kids.into_iter().map(|c| (key(u, c), c)).collect();
        keyed.sort_by(|a, b| {
            a.0 .0
                .total_cmp(&b.0 .0)
                .then(a.0 .1.total_cmp(&b.0 .1))
                .then(a.1.cmp(&b.1))
                .then(Ordering::Equal)
        });
        let x = |j: usize| if j == 0 { u } else { keyed[j - 1].1 };
        for i in 1..=keyed.len() {
            parent[keyed[i - 1].1.idx()] = Some(x(phi(i)));
        }
    }
    SpanningTree::from_parents(tree.root(), parent).expect("re-hanging below earlier siblings keeps a tree")
}
