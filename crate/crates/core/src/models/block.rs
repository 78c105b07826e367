//! The `(K, C)` block model: `K` nonzeros in exactly `C` maximal runs.

use super::binomial::{binomial_count, binomial_u128, Count};
use crate::error::{domain, Error, Result};

/// Largest signal length accepted by the exhaustive enumerator.
pub const BLOCK_ENUMERATION_LIMIT: usize = 24;

/// Run-length description of one block support.
///
/// `runs` alternates zero and nonzero runs and has `2C + 1` entries:
/// `[z0, b1, z1, b2, ..., bC, zC]`. The two outer zero runs may be empty,
/// every other run has length at least one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockPattern {
    runs: Vec<usize>,
}

impl BlockPattern {
    pub fn from_runs(runs: Vec<usize>) -> Result<Self> {
        if runs.len() < 3 || runs.len().is_multiple_of(2) {
            return domain(format!("block pattern needs 2C+1 >= 3 runs, got {}", runs.len()));
        }
        let last = runs.len() - 1;
        for (i, &r) in runs.iter().enumerate() {
            if i != 0 && i != last && r == 0 {
                return domain(format!("interior run {i} is empty"));
            }
        }
        Ok(BlockPattern { runs })
    }

    pub fn runs(&self) -> &[usize] {
        &self.runs
    }

    /// Signal length `sum(runs)`.
    pub fn len(&self) -> usize {
        self.runs.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clusters(&self) -> usize {
        self.runs.len() / 2
    }

    /// Number of nonzeros `sum of the odd-position runs`.
    pub fn sparsity(&self) -> usize {
        self.runs.iter().skip(1).step_by(2).sum()
    }

    /// Sorted indices of the nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.sparsity());
        let mut pos = 0;
        for (i, &r) in self.runs.iter().enumerate() {
            if i % 2 == 1 {
                out.extend(pos..pos + r);
            }
            pos += r;
        }
        out
    }
}

fn check_dims(n: usize, k: usize, c: usize) -> Result<()> {
    if c == 0 || c > k {
        return domain(format!("block model needs 1 <= C <= k, got C = {c}, k = {k}"));
    }
    if k > n {
        return domain(format!("block model needs k <= N, got k = {k}, N = {n}"));
    }
    Ok(())
}

/// `C(N + 1 - k, C) * C(k - 1, C - 1)`: length-`N` supports with `k` ones in
/// exactly `C` maximal runs.
pub fn block_subspace_count(n: usize, k: usize, c: usize) -> Result<Count> {
    check_dims(n, k, c)?;
    let gaps = binomial_count((n + 1 - k) as u64, c as u64);
    let sizes = binomial_count((k - 1) as u64, (c - 1) as u64);
    Ok(gaps.mul(sizes))
}

/// Every length-`N` support with `k` ones in exactly `C` runs.
pub fn enumerate_block_supports(n: usize, k: usize, c: usize) -> Result<Vec<BlockPattern>> {
    if n > BLOCK_ENUMERATION_LIMIT {
        return Err(Error::Guard {
            what: format!("block enumeration at N = {n}"),
            limit: BLOCK_ENUMERATION_LIMIT as u128,
        });
    }
    check_dims(n, k, c)?;
    let mut out = Vec::new();
    let mut runs = Vec::with_capacity(2 * c + 1);
    extend_runs(n, k, c, &mut runs, &mut out);
    Ok(out)
}

// Places the leading zero run, then alternates (block, gap) until the
// remaining length is consumed by the trailing zero run.
fn extend_runs(
    remaining_len: usize,
    ones_left: usize,
    clusters_left: usize,
    runs: &mut Vec<usize>,
    out: &mut Vec<BlockPattern>,
) {
    if clusters_left == 0 {
        if ones_left == 0 {
            runs.push(remaining_len);
            out.push(BlockPattern { runs: runs.clone() });
            runs.pop();
        }
        return;
    }
    let first = runs.is_empty();
    let min_gap = if first { 0 } else { 1 };
    // the remaining blocks need ones_left ones plus clusters_left - 1 separators
    let needed = ones_left + clusters_left - 1;
    if remaining_len < needed + min_gap {
        return;
    }
    for gap in min_gap..=remaining_len - needed {
        runs.push(gap);
        let max_block = ones_left - (clusters_left - 1);
        for block in 1..=max_block {
            runs.push(block);
            extend_runs(remaining_len - gap - block, ones_left - block, clusters_left - 1, runs, out);
            runs.pop();
        }
        runs.pop();
    }
}

/// Rank-indexed view of the block supports, used for uniform sampling and
/// for streaming censuses without materializing the family.
#[derive(Debug, Clone)]
pub struct BlockFamily {
    n: usize,
    k: usize,
    c: usize,
    gap_choices: u128,
    size_choices: u128,
}

impl BlockFamily {
    pub fn new(n: usize, k: usize, c: usize) -> Result<Self> {
        check_dims(n, k, c)?;
        let too_big = || Error::Guard {
            what: format!("block family count for N = {n}, k = {k}, C = {c}"),
            limit: u128::MAX,
        };
        let gap_choices = binomial_u128((n + 1 - k) as u64, c as u64).ok_or_else(too_big)?;
        let size_choices = binomial_u128((k - 1) as u64, (c - 1) as u64).ok_or_else(too_big)?;
        gap_choices.checked_mul(size_choices).ok_or_else(too_big)?;
        Ok(BlockFamily { n, k, c, gap_choices, size_choices })
    }

    pub fn count(&self) -> u128 {
        self.gap_choices * self.size_choices
    }

    /// The support of rank `r` in `0..count()`.
    ///
    /// A pattern is a pair (cut positions splitting `k` into `C` positive
    /// block sizes, slot positions splitting `N - k` zeros into `C + 1` gaps
    /// with positive interiors); each half is decoded from its combinadic.
    pub fn pattern(&self, rank: u128) -> BlockPattern {
        debug_assert!(rank < self.count());
        let (gap_rank, size_rank) = (rank / self.size_choices, rank % self.size_choices);
        let cuts = unrank_combination(self.k.saturating_sub(1), self.c - 1, size_rank);
        let slots = unrank_combination(self.n + 1 - self.k, self.c, gap_rank);

        let mut sizes = Vec::with_capacity(self.c);
        let mut prev = 0;
        for &cut in &cuts {
            sizes.push(cut + 1 - prev);
            prev = cut + 1;
        }
        sizes.push(self.k - prev);

        // slots p_1 < ... < p_C in 0..=N-k; gaps g_0 = p_1, g_i = p_{i+1} - p_i
        // (>= 1), trailing gap takes the rest
        let mut gaps = Vec::with_capacity(self.c + 1);
        let mut prev = 0;
        for (i, &p) in slots.iter().enumerate() {
            gaps.push(if i == 0 { p } else { p - prev });
            prev = p;
        }
        gaps.push(self.n - self.k - prev);

        let mut runs = Vec::with_capacity(2 * self.c + 1);
        for i in 0..self.c {
            runs.push(gaps[i]);
            runs.push(sizes[i]);
        }
        runs.push(gaps[self.c]);
        BlockPattern { runs }
    }
}

/// Lexicographic unranking of a `k`-subset of `0..n`.
pub(crate) fn unrank_combination(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot - 1;
        loop {
            let with_next = binomial_u128((n - next - 1) as u64, remaining as u64)
                .expect("subfamily of a representable family");
            if rank < with_next {
                break;
            }
            rank -= with_next;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Number of maximal runs of ones in a support given as sorted indices.
pub fn count_runs(support: &[usize]) -> usize {
    support
        .iter()
        .enumerate()
        .filter(|&(i, &s)| i == 0 || support[i - 1] + 1 != s)
        .count()
}
