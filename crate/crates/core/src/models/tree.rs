//! Connected rooted subtrees of a heap-ordered binary tree.
//!
//! Node `0` is the root and node `i` has children `2i + 1` and `2i + 2`
//! when those are below the node count. A complete tree of depth `d` has
//! `2^d - 1` nodes; signal indices follow the same breadth-first order.

use super::binomial::Count;
use crate::error::{domain, Error, Result};

/// Largest node count accepted by the exhaustive tree enumerator.
pub const TREE_NODE_LIMIT: usize = 1 << 15;
/// Largest number of supports the enumerator will materialize.
pub const TREE_LIST_LIMIT: u128 = 10_000_000;
/// Largest `nodes * (size + 1)` table the exact counter will build.
pub const TREE_TABLE_LIMIT: u128 = 1 << 22;

/// Which bound on the number of tree supports applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `k < log2 N`: `T_k <= (2e)^k / (k + 1)`.
    SmallK,
    /// `k >= log2 N`: `T_k <= 4^(k+4) / (k e^2)`.
    LargeK,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::SmallK => "small_k",
            Regime::LargeK => "large_k",
        }
    }
}

/// A root-containing, parent-closed node set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeSupport {
    nodes: Vec<usize>,
    node_count: usize,
}

impl TreeSupport {
    /// Validates that `nodes` is a connected subtree containing the root.
    pub fn new(mut nodes: Vec<usize>, node_count: usize) -> Result<Self> {
        nodes.sort_unstable();
        nodes.dedup();
        if nodes.first() != Some(&0) && !nodes.is_empty() {
            return domain("tree support must contain the root");
        }
        if nodes.iter().any(|&v| v >= node_count) {
            return domain("tree support node outside the tree");
        }
        for &v in &nodes[1.min(nodes.len())..] {
            if nodes.binary_search(&((v - 1) / 2)).is_err() {
                return domain(format!("node {v} is present without its parent"));
            }
        }
        Ok(TreeSupport { nodes, node_count })
    }

    /// Sorted node indices.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn is_parent_closed(&self) -> bool {
        self.nodes.iter().all(|&v| v == 0 || self.nodes.binary_search(&((v - 1) / 2)).is_ok())
    }
}

/// Node count of the complete binary tree of the given depth.
pub fn complete_tree_nodes(depth: u32) -> Result<usize> {
    if depth == 0 || depth > 15 {
        return Err(Error::Guard {
            what: format!("complete tree of depth {depth}"),
            limit: TREE_NODE_LIMIT as u128,
        });
    }
    Ok((1usize << depth) - 1)
}

/// Log-scale upper bound on the number of tree supports of size `k` for a
/// signal of length `N = 2^I`, with the regime that produced it.
pub fn tree_subspace_bound(n: u64, k: u64) -> Result<(f64, Regime)> {
    if k == 0 {
        return domain("tree bound needs k >= 1");
    }
    if !n.is_power_of_two() {
        return domain(format!("tree bound needs N a power of two, got {n}"));
    }
    let log2n = n.trailing_zeros() as u64;
    let kf = k as f64;
    if k < log2n {
        Ok((kf * (2.0 * std::f64::consts::E).ln() - (kf + 1.0).ln(), Regime::SmallK))
    } else {
        Ok(((kf + 4.0) * 4f64.ln() - kf.ln() - 2.0, Regime::LargeK))
    }
}

/// Exact counts of rooted connected subtrees for every node and size.
///
/// `table[v][s]` is the number of connected subtrees of size `s` rooted at
/// `v` inside the subtree below `v`; `None` marks a `u128` overflow.
#[derive(Debug, Clone)]
pub struct TreeFamily {
    node_count: usize,
    size: usize,
    table: Vec<Vec<Option<u128>>>,
}

impl TreeFamily {
    pub fn new(node_count: usize, size: usize) -> Result<Self> {
        if node_count == 0 || node_count > TREE_NODE_LIMIT {
            return Err(Error::Guard {
                what: format!("tree with {node_count} nodes"),
                limit: TREE_NODE_LIMIT as u128,
            });
        }
        if size > node_count {
            return domain(format!("subtree size {size} exceeds {node_count} nodes"));
        }
        if (node_count as u128) * (size as u128 + 1) > TREE_TABLE_LIMIT {
            return Err(Error::Guard {
                what: format!("subtree count table for {node_count} nodes, size {size}"),
                limit: TREE_TABLE_LIMIT,
            });
        }
        let mut table = vec![Vec::new(); node_count];
        for v in (0..node_count).rev() {
            let left = 2 * v + 1;
            let right = 2 * v + 2;
            let mut row = vec![Some(0u128); size + 1];
            row[0] = Some(1);
            for s in 1..=size {
                let mut acc = Some(0u128);
                for a in 0..s {
                    let l = child_count(&table, left, node_count, a);
                    let r = child_count(&table, right, node_count, s - 1 - a);
                    acc = match (acc, l, r) {
                        (_, Some(0), _) | (_, _, Some(0)) => acc,
                        (Some(t), Some(l), Some(r)) => l.checked_mul(r).and_then(|p| t.checked_add(p)),
                        _ => None,
                    };
                }
                row[s] = acc;
            }
            table[v] = row;
        }
        Ok(TreeFamily { node_count, size, table })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of root-containing subtrees of the configured size.
    pub fn count(&self) -> Count {
        match self.table[0][self.size] {
            Some(v) => Count::Exact(v),
            None => Count::Overflow { ln: f64::NAN },
        }
    }

    /// The support of rank `r`; `None` if the count overflowed.
    pub fn support(&self, rank: u128) -> Option<TreeSupport> {
        let total = self.table[0][self.size]?;
        if rank >= total {
            return None;
        }
        let mut nodes = Vec::with_capacity(self.size);
        self.unrank(0, self.size, rank, &mut nodes);
        nodes.sort_unstable();
        Some(TreeSupport { nodes, node_count: self.node_count })
    }

    fn unrank(&self, v: usize, s: usize, mut rank: u128, out: &mut Vec<usize>) {
        if s == 0 {
            return;
        }
        out.push(v);
        let (left, right) = (2 * v + 1, 2 * v + 2);
        for a in 0..s {
            let l = child_count(&self.table, left, self.node_count, a).unwrap_or(0);
            let r = child_count(&self.table, right, self.node_count, s - 1 - a).unwrap_or(0);
            let block = l * r;
            if rank < block {
                self.unrank(left, a, rank / r, out);
                self.unrank(right, s - 1 - a, rank % r, out);
                return;
            }
            rank -= block;
        }
        unreachable!("rank within the subtree count");
    }
}

fn child_count(table: &[Vec<Option<u128>>], child: usize, node_count: usize, s: usize) -> Option<u128> {
    if child >= node_count {
        Some(if s == 0 { 1 } else { 0 })
    } else {
        table[child][s]
    }
}

/// Every connected subtree of size `k` containing the root of the complete
/// binary tree of the given depth.
pub fn enumerate_tree_supports(depth: u32, k: usize) -> Result<Vec<TreeSupport>> {
    let nodes = complete_tree_nodes(depth)?;
    enumerate_heap_subtrees(nodes, k)
}

/// As [`enumerate_tree_supports`] for a heap-ordered tree of any node count.
pub fn enumerate_heap_subtrees(node_count: usize, k: usize) -> Result<Vec<TreeSupport>> {
    if node_count > TREE_NODE_LIMIT {
        return Err(Error::Guard {
            what: format!("tree with {node_count} nodes"),
            limit: TREE_NODE_LIMIT as u128,
        });
    }
    if k > node_count {
        return domain(format!("subtree size {k} exceeds {node_count} nodes"));
    }
    let mut out = Vec::new();
    if k == 0 {
        out.push(TreeSupport { nodes: Vec::new(), node_count });
        return Ok(out);
    }
    // grow by frontier choice: each subtree is produced once by always
    // adding frontier nodes in increasing index order
    let mut current = vec![0usize];
    let frontier: Vec<usize> = children(0, node_count).collect();
    let mut produced = 0u128;
    grow(&mut current, &frontier, k, node_count, &mut out, &mut produced)?;
    Ok(out)
}

fn children(v: usize, node_count: usize) -> impl Iterator<Item = usize> {
    [2 * v + 1, 2 * v + 2].into_iter().filter(move |&c| c < node_count)
}

fn grow(
    current: &mut Vec<usize>,
    frontier: &[usize],
    k: usize,
    node_count: usize,
    out: &mut Vec<TreeSupport>,
    produced: &mut u128,
) -> Result<()> {
    if current.len() == k {
        *produced += 1;
        if *produced > TREE_LIST_LIMIT {
            return Err(Error::Guard { what: "tree support list".into(), limit: TREE_LIST_LIMIT });
        }
        let mut nodes = current.clone();
        nodes.sort_unstable();
        out.push(TreeSupport { nodes, node_count });
        return Ok(());
    }
    // pick frontier[i]; nodes frontier[..i] are excluded for this branch
    for i in 0..frontier.len() {
        let v = frontier[i];
        let mut next: Vec<usize> = frontier[i + 1..].to_vec();
        next.extend(children(v, node_count));
        current.push(v);
        grow(current, &next, k, node_count, out, produced)?;
        current.pop();
    }
    Ok(())
}

/// The `k`-th Catalan number, exact.
pub fn catalan(k: u64) -> Option<u128> {
    super::binomial::binomial_u128(2 * k, k).map(|c| c / (k as u128 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_tree_supports(4, 1).unwrap().len(), 1);
        assert_eq!(enumerate_tree_supports(4, 1).unwrap()[0].nodes(), &[0]);
        assert_eq!(enumerate_tree_supports(4, 3).unwrap().len(), 5);
        assert_eq!(enumerate_tree_supports(5, 4).unwrap().len(), 14);
    }

    #[test]
    fn truncated_trees_have_fewer_supports() {
        // depth 2 has only 3 nodes: a single subtree of size 3
        assert_eq!(enumerate_tree_supports(2, 3).unwrap().len(), 1);
        assert_eq!(enumerate_tree_supports(3, 4).unwrap().len(), 6);
    }

    #[test]
    fn bounds() {
        let (b, r) = tree_subspace_bound(256, 3).unwrap();
        assert_eq!(r, Regime::SmallK);
        assert!((b.exp() - 40.171_073_846_375_335).abs() < 1e-9);
        let (b, r) = tree_subspace_bound(256, 1).unwrap();
        assert_eq!(r, Regime::SmallK);
        assert!((b - 1.0).abs() < 1e-15);
        let (b, r) = tree_subspace_bound(16, 8).unwrap();
        assert_eq!(r, Regime::LargeK);
        assert!((b - 12.556_090_791_758_851).abs() < 1e-12);
        // tie goes to the large-k branch
        assert_eq!(tree_subspace_bound(16, 4).unwrap().1, Regime::LargeK);
        assert!(tree_subspace_bound(12, 2).is_err());
        assert!(tree_subspace_bound(16, 0).is_err());
    }

    #[test]
    fn family_unranking_matches_enumeration() {
        for (nodes, k) in [(15, 3), (15, 5), (10, 4), (31, 6), (7, 7)] {
            let fam = TreeFamily::new(nodes, k).unwrap();
            let listed: HashSet<_> = enumerate_heap_subtrees(nodes, k).unwrap().into_iter().collect();
            let total = fam.count().exact().unwrap();
            assert_eq!(total as usize, listed.len());
            let unranked: HashSet<_> = (0..total).map(|r| fam.support(r).unwrap()).collect();
            assert_eq!(unranked, listed);
        }
    }

    #[test]
    fn support_validation() {
        assert!(TreeSupport::new(vec![0, 1, 4], 15).is_ok());
        assert!(TreeSupport::new(vec![0, 4], 15).is_err());
        assert!(TreeSupport::new(vec![1, 3], 15).is_err());
        assert!(TreeSupport::new(vec![0, 20], 15).is_err());
    }

    #[test]
    fn catalan_numbers() {
        let want = [1u128, 1, 2, 5, 14, 42, 132, 429];
        for (k, &w) in want.iter().enumerate() {
            assert_eq!(catalan(k as u64), Some(w));
        }
    }

    #[test]
    fn guards() {
        assert!(complete_tree_nodes(16).is_err());
        assert!(TreeFamily::new(TREE_NODE_LIMIT + 1, 2).is_err());
        assert!(enumerate_heap_subtrees(7, 8).is_err());
    }
}
