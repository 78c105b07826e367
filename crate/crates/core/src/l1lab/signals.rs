use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Result};
use crate::models::{BlockFamily, TreeFamily};
use crate::seeding;

/// Which model produced a signal, and how its support was drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Simple,
    Block { clusters: usize },
    /// `uniform` is false when the support came from random growth instead of
    /// exact unranking.
    Tree { uniform: bool },
}

/// A sparse coefficient vector with its support.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub coefficients: Vec<f64>,
    /// Sorted support indices.
    pub support: Vec<usize>,
    pub provenance: Provenance,
}

impl Signal {
    fn with_support(len: usize, support: Vec<usize>, provenance: Provenance, rng: &mut impl Rng) -> Self {
        let mut coefficients = vec![0.0; len];
        for &i in &support {
            coefficients[i] = StandardNormal.sample(rng);
        }
        Signal { coefficients, support, provenance }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        self.coefficients.iter().map(|v| v.abs()).sum()
    }
}

/// Uniform `k`-subset support with standard normal values.
pub fn sample_simple_signal(n: usize, k: usize, seed: u64) -> Result<Signal> {
    if k > n {
        return domain(format!("k = {k} exceeds N = {n}"));
    }
    let mut rng = seeding::rng(seed);
    let mut support = sample(&mut rng, n, k).into_vec();
    support.sort_unstable();
    Ok(Signal::with_support(n, support, Provenance::Simple, &mut rng))
}

/// Block support drawn exactly uniformly from the `(K, C)` patterns.
pub fn sample_block_signal(n: usize, k: usize, c: usize, seed: u64) -> Result<Signal> {
    if k > n {
        return domain(format!("k = {k} exceeds N = {n}"));
    }
    if k == 0 {
        return Ok(Signal { coefficients: vec![0.0; n], support: Vec::new(), provenance: Provenance::Block { clusters: 0 } });
    }
    let family = BlockFamily::new(n, k, c)?;
    let mut rng = seeding::rng(seed);
    let rank = rng.random_range(0..family.count());
    let support = family.pattern(rank).support();
    Ok(Signal::with_support(n, support, Provenance::Block { clusters: c }, &mut rng))
}

/// Connected rooted subtree support on the complete tree of the given depth.
pub fn sample_tree_signal(depth: u32, k: usize, seed: u64) -> Result<Signal> {
    let nodes = crate::models::complete_tree_nodes(depth)?;
    sample_tree_signal_on(nodes, k, seed)
}

/// Tree support on a heap-ordered tree with `node_count` nodes; the signal
/// has one coefficient per node in breadth-first order.
///
/// Sizes whose subtree count fits the exact counting table are drawn
/// uniformly by unranking; larger ones grow the subtree by uniform frontier
/// attachment and are flagged non-uniform.
pub fn sample_tree_signal_on(node_count: usize, k: usize, seed: u64) -> Result<Signal> {
    if k > node_count {
        return domain(format!("subtree size {k} exceeds {node_count} nodes"));
    }
    let mut rng = seeding::rng(seed);
    if k == 0 {
        return Ok(Signal { coefficients: vec![0.0; node_count], support: Vec::new(), provenance: Provenance::Tree { uniform: true } });
    }
    let exact = TreeFamily::new(node_count, k).ok().and_then(|fam| {
        let total = fam.count().exact()?;
        Some((fam, total))
    });
    let (support, uniform) = match exact {
        Some((fam, total)) => {
            let rank = rng.random_range(0..total);
            (fam.support(rank).expect("rank below count").nodes().to_vec(), true)
        }
        None => (grow_subtree(node_count, k, &mut rng), false),
    };
    Ok(Signal::with_support(node_count, support, Provenance::Tree { uniform }, &mut rng))
}

fn grow_subtree(node_count: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut nodes = vec![0usize];
    let mut frontier: Vec<usize> = [1, 2].into_iter().filter(|&c| c < node_count).collect();
    while nodes.len() < k {
        let pick = frontier.swap_remove(rng.random_range(0..frontier.len()));
        nodes.push(pick);
        frontier.extend([2 * pick + 1, 2 * pick + 2].into_iter().filter(|&c| c < node_count));
    }
    nodes.sort_unstable();
    nodes
}
