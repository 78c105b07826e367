//! Sparsity models, subspace counts and cross-polytope face counts.

mod binomial;
mod block;
mod tree;

use std::fmt;

pub use binomial::{binomial_count, binomial_u128, log_binomial, Count};
pub use block::{
    block_subspace_count, count_runs, enumerate_block_supports, BlockFamily, BlockPattern,
    BLOCK_ENUMERATION_LIMIT,
};
pub(crate) use block::unrank_combination;
pub use tree::{
    catalan, complete_tree_nodes, enumerate_heap_subtrees, enumerate_tree_supports,
    tree_subspace_bound, Regime, TreeFamily, TreeSupport, TREE_NODE_LIMIT,
};

use crate::error::{domain, Error, Result};

/// Ambient dimension `N`, measurement count `n` and sparsity `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProblemSize {
    pub ambient: usize,
    pub measurements: usize,
    pub sparsity: usize,
}

impl ProblemSize {
    pub fn new(ambient: usize, measurements: usize, sparsity: usize) -> Result<Self> {
        if measurements == 0 || measurements > ambient {
            return domain(format!("need 0 < n <= N, got n = {measurements}, N = {ambient}"));
        }
        if sparsity > measurements {
            return domain(format!("need k <= n, got k = {sparsity}, n = {measurements}"));
        }
        Ok(ProblemSize { ambient, measurements, sparsity })
    }

    /// Undersampling ratio `n / N`.
    pub fn delta(&self) -> f64 {
        self.measurements as f64 / self.ambient as f64
    }

    /// Sparsity ratio `k / n`.
    pub fn rho(&self) -> f64 {
        self.sparsity as f64 / self.measurements as f64
    }
}

/// How the clusters of a block model are specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockClusters {
    /// A fixed number of clusters `C`.
    Count(usize),
    /// A cluster fraction `zeta`, with `C = floor(zeta * k)` (at least one).
    Fraction(f64),
}

/// Tree regime selection; `Auto` picks by comparing `k` with `log2 N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeRegime {
    SmallK,
    LargeK,
    Auto,
}

/// The structure that governs admissible supports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SparsityModel {
    Simple,
    Block(BlockClusters),
    Tree(TreeRegime),
}

impl SparsityModel {
    pub fn block_fraction(zeta: f64) -> Result<Self> {
        if !(zeta > 0.0 && zeta <= 1.0) {
            return domain(format!("cluster fraction must lie in (0, 1], got {zeta}"));
        }
        Ok(SparsityModel::Block(BlockClusters::Fraction(zeta)))
    }

    pub fn block_count(c: usize) -> Result<Self> {
        if c == 0 {
            return domain("cluster count must be at least 1");
        }
        Ok(SparsityModel::Block(BlockClusters::Count(c)))
    }

    /// Short model tag used in CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            SparsityModel::Simple => "simple",
            SparsityModel::Block(_) => "block",
            SparsityModel::Tree(_) => "tree",
        }
    }

    /// Model parameter as printed in CSV output.
    pub fn param_label(&self) -> String {
        match self {
            SparsityModel::Simple => "none".to_string(),
            SparsityModel::Block(BlockClusters::Fraction(z)) => format!("zeta={z}"),
            SparsityModel::Block(BlockClusters::Count(c)) => format!("C={c}"),
            SparsityModel::Tree(TreeRegime::SmallK) => "small_k".to_string(),
            SparsityModel::Tree(TreeRegime::LargeK) => "large_k".to_string(),
            SparsityModel::Tree(TreeRegime::Auto) => "auto".to_string(),
        }
    }

    /// Cluster count for a block support of size `k` (`None` otherwise).
    pub fn clusters_for(&self, k: usize) -> Result<Option<usize>> {
        match *self {
            SparsityModel::Block(BlockClusters::Count(c)) => {
                if c > k {
                    return domain(format!("C = {c} clusters cannot hold k = {k} nonzeros"));
                }
                Ok(Some(c))
            }
            SparsityModel::Block(BlockClusters::Fraction(z)) => {
                if k == 0 {
                    return Ok(Some(0));
                }
                Ok(Some(((z * k as f64).floor() as usize).clamp(1, k)))
            }
            _ => Ok(None),
        }
    }
}

impl fmt::Display for SparsityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.param_label())
    }
}

/// Resolves a tree regime for a length-`N` signal with `k` nonzeros.
/// Ties `k = log2 N` go to [`Regime::LargeK`].
pub fn resolve_regime(regime: TreeRegime, n: u64, k: u64) -> Result<Regime> {
    match regime {
        TreeRegime::SmallK => Ok(Regime::SmallK),
        TreeRegime::LargeK => Ok(Regime::LargeK),
        TreeRegime::Auto => {
            if !n.is_power_of_two() {
                return domain(format!("tree regime needs N a power of two, got {n}"));
            }
            Ok(if k < n.trailing_zeros() as u64 { Regime::SmallK } else { Regime::LargeK })
        }
    }
}

/// The bound of one regime, evaluated regardless of where `k` sits.
pub fn tree_bound_for_regime(k: u64, regime: Regime) -> Result<f64> {
    if k == 0 {
        return domain("tree bound needs k >= 1");
    }
    let kf = k as f64;
    Ok(match regime {
        Regime::SmallK => kf * (2.0 * std::f64::consts::E).ln() - (kf + 1.0).ln(),
        Regime::LargeK => (kf + 4.0) * 4f64.ln() - kf.ln() - 2.0,
    })
}

/// `2^{k+1} C(N, k+1)`: the number of `k`-faces of the `N`-dimensional
/// cross-polytope.
pub fn simple_face_count(n: usize, k: usize) -> Result<Count> {
    if k >= n {
        return domain(format!("k-faces need k < N, got k = {k}, N = {n}"));
    }
    let signs = if k + 1 < 128 {
        Count::Exact(1u128 << (k + 1))
    } else {
        Count::Overflow { ln: (k + 1) as f64 * std::f64::consts::LN_2 }
    };
    Ok(signs.mul(binomial_count(n as u64, (k + 1) as u64)))
}

/// `ln m_k`, the support count entering the face count and prefactor.
///
/// Simple sparsity uses `C(N, k+1)`; blocks use the exact `(K, C)` count;
/// trees use the regime bound (which needs `N` a power of two).
pub fn log_support_count(model: &SparsityModel, n: usize, k: usize) -> Result<f64> {
    match model {
        SparsityModel::Simple => {
            if k + 1 > n {
                return domain(format!("need k + 1 <= N, got k = {k}, N = {n}"));
            }
            Ok(binomial_count(n as u64, (k + 1) as u64).ln())
        }
        SparsityModel::Block(_) => {
            let c = model.clusters_for(k)?.unwrap_or(0);
            Ok(block_subspace_count(n, k, c)?.ln())
        }
        SparsityModel::Tree(regime) => {
            if !(n as u64).is_power_of_two() {
                return domain(format!("tree model needs N a power of two, got {n}"));
            }
            let regime = resolve_regime(*regime, n as u64, k as u64)?;
            tree_bound_for_regime(k as u64, regime)
        }
    }
}

/// `ln(2^{l+1} m_k C(N-k-1, l-k))`.
pub fn combinatorial_prefactor(model: &SparsityModel, n: usize, k: usize, l: usize) -> Result<f64> {
    if l < k {
        return domain(format!("prefactor needs l >= k, got l = {l}, k = {k}"));
    }
    if l >= n {
        return domain(format!("prefactor needs l < N, got l = {l}, N = {n}"));
    }
    let pairs = log_binomial((n - k - 1) as i64, (l - k) as i64)?;
    Ok((l + 1) as f64 * std::f64::consts::LN_2 + log_support_count(model, n, k)? + pairs)
}

/// Evaluation route for [`delta_diff`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffMode {
    /// `(1/N) ln(B_(K,C) / C(N, k+1))`.
    Exact,
    /// `C/N - k/N`, the first-order expansion for `k << N`.
    Asymptotic,
}

/// Per-dimension log-ratio of the block and simple prefactors.
pub fn delta_diff(n: usize, k: usize, c: usize, mode: DiffMode) -> Result<f64> {
    if c == 0 || c > k || k > n {
        return domain(format!("need 1 <= C <= k <= N, got C = {c}, k = {k}, N = {n}"));
    }
    let nf = n as f64;
    match mode {
        DiffMode::Asymptotic => Ok((c as f64 - k as f64) / nf),
        DiffMode::Exact => {
            if k + 1 > n {
                return domain("exact mode needs k < N");
            }
            let block = block_subspace_count(n, k, c)?.ln();
            let simple = log_binomial(n as i64, (k + 1) as i64)?;
            Ok((block - simple) / nf)
        }
    }
}

/// Convenience error for callers holding a model that lacks a parameter.
pub(crate) fn model_error<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Model(msg.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octahedron_face_vector() {
        let f: Vec<_> = (0..3).map(|k| simple_face_count(3, k).unwrap().exact().unwrap()).collect();
        assert_eq!(f, vec![6, 12, 8]);
        assert_eq!(simple_face_count(10, 2).unwrap(), Count::Exact(960));
        assert!(simple_face_count(3, 3).is_err());
        assert!(simple_face_count(300, 200).unwrap().is_overflow());
    }

    #[test]
    fn prefactor_examples() {
        let simple = combinatorial_prefactor(&SparsityModel::Simple, 6, 1, 2).unwrap();
        assert!((simple - 480f64.ln()).abs() < 1e-12);
        let block = combinatorial_prefactor(&SparsityModel::block_count(1).unwrap(), 6, 1, 2).unwrap();
        assert!(block <= simple);
        let reduced = combinatorial_prefactor(&SparsityModel::Simple, 9, 3, 3).unwrap();
        assert!((reduced - simple_face_count(9, 3).unwrap().ln()).abs() < 1e-12);
        assert!(combinatorial_prefactor(&SparsityModel::Simple, 9, 3, 2).is_err());
    }

    #[test]
    fn tree_prefactor_uses_the_bound() {
        let model = SparsityModel::Tree(TreeRegime::Auto);
        let got = log_support_count(&model, 256, 3).unwrap();
        assert!((got - tree_subspace_bound(256, 3).unwrap().0).abs() < 1e-15);
        assert!(log_support_count(&model, 100, 3).is_err());
    }

    #[test]
    fn delta_diff_examples() {
        let a = delta_diff(1_000_000, 100, 10, DiffMode::Asymptotic).unwrap();
        assert!((a + 9.0e-5).abs() < 1e-18);
        assert_eq!(delta_diff(1000, 7, 7, DiffMode::Asymptotic).unwrap(), 0.0);
        assert!(delta_diff(10, 3, 4, DiffMode::Exact).is_err());
    }

    #[test]
    fn cluster_rounding() {
        let m = SparsityModel::block_fraction(0.5).unwrap();
        assert_eq!(m.clusters_for(5).unwrap(), Some(2));
        assert_eq!(m.clusters_for(1).unwrap(), Some(1));
        assert!(SparsityModel::block_fraction(0.0).is_err());
        assert!(SparsityModel::block_fraction(1.5).is_err());
        assert!(SparsityModel::block_count(4).unwrap().clusters_for(3).is_err());
    }

    #[test]
    fn regime_resolution() {
        assert_eq!(resolve_regime(TreeRegime::Auto, 256, 7).unwrap(), Regime::SmallK);
        assert_eq!(resolve_regime(TreeRegime::Auto, 256, 8).unwrap(), Regime::LargeK);
        assert_eq!(resolve_regime(TreeRegime::SmallK, 256, 100).unwrap(), Regime::SmallK);
    }

    #[test]
    fn problem_size_invariants() {
        assert!(ProblemSize::new(10, 0, 0).is_err());
        assert!(ProblemSize::new(10, 11, 0).is_err());
        assert!(ProblemSize::new(10, 5, 6).is_err());
        let s = ProblemSize::new(10, 5, 2).unwrap();
        assert_eq!((s.delta(), s.rho()), (0.5, 0.4));
    }
}
