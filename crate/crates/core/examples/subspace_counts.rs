//! Closed-form structured subspace counts against brute-force enumeration.

use ptlab::models::{
    block_subspace_count, catalan, enumerate_block_supports, enumerate_tree_supports, log_binomial,
    tree_subspace_bound, BlockFamily,
};

fn main() {
    let (n, k, c) = (10, 4, 2);
    let formula = block_subspace_count(n, k, c).unwrap();
    let listed = enumerate_block_supports(n, k, c).unwrap();
    println!("(K, C) = ({k}, {c}) blocks in N = {n}: formula {formula:?}, enumerated {}", listed.len());
    let family = BlockFamily::new(n, k, c).unwrap();
    for rank in [0, 1, 62] {
        println!("  pattern #{rank}: support {:?}", family.pattern(rank).support());
    }

    for (depth, k) in [(4u32, 3usize), (6, 5), (10, 8)] {
        let trees = enumerate_tree_supports(depth, k).unwrap().len();
        let (ln_bound, regime) = tree_subspace_bound(1 << depth, k as u64).unwrap();
        println!(
            "depth {depth}, k = {k}: {trees} subtrees (Catalan {}), bound {:.2} [{}]",
            catalan(k as u64).unwrap(),
            ln_bound.exp(),
            regime.name()
        );
    }

    println!("ln C(10^7, 5*10^5) = {:.6}", log_binomial(10_000_000, 500_000).unwrap());
}
