//! Tree-model thresholds for both subtree-count regimes.

use ptlab::thresholds::{delta_of_rho, rho_of_delta, sample_curve, ThresholdParams};
use ptlab::{SparsityModel, TreeRegime};

fn main() {
    let params = ThresholdParams::default();
    let small = SparsityModel::Tree(TreeRegime::SmallK);
    let large = SparsityModel::Tree(TreeRegime::LargeK);
    let a = sample_curve(&small, 1e-3, 0.5, 8, &params).unwrap();
    let b = sample_curve(&large, 1e-3, 0.5, 8, &params).unwrap();
    println!("{:>10}  {:>10}  {:>10}", "delta", "small_k", "large_k");
    for (i, p) in a.points.iter().enumerate() {
        let l = b.points.get(i).map_or("> 1/2".to_string(), |q| format!("{:.5}", q.rho));
        println!("{:>10.5}  {:>10.5}  {:>10}", p.delta, p.rho, l);
    }

    // the explicit inverse and the implicit solve agree
    let rho = 0.2;
    for m in [small, large] {
        let delta = delta_of_rho(&m, rho, &params).unwrap();
        let back = rho_of_delta(&m, delta, &params).unwrap();
        println!("{m}: delta({rho}) = {delta:.6}, rho(delta) = {back:.12}");
    }
}
