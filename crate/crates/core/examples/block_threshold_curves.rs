//! Strong-threshold curves of the block model for several cluster fractions,
//! next to the simple-sparsity baseline.
//!
//! ```text
//! cargo run --example block_threshold_curves
//! ```

use ptlab::thresholds::{sample_curve, ThresholdParams};
use ptlab::SparsityModel;

fn main() {
    let params = ThresholdParams::default();
    let zetas = [0.25, 0.5, 0.75, 1.0];
    let mut curves = Vec::new();
    for z in zetas {
        let model = SparsityModel::block_fraction(z).unwrap();
        curves.push(sample_curve(&model, 1e-3, 0.5, 12, &params).unwrap());
    }
    let simple = sample_curve(&SparsityModel::Simple, 1e-3, 0.5, 12, &params).unwrap();

    print!("{:>10}", "delta");
    for z in zetas {
        print!("  zeta={z:<5}");
    }
    println!("  simple");
    for (i, p) in simple.points.iter().enumerate() {
        print!("{:>10.5}", p.delta);
        for c in &curves {
            match c.points.get(i) {
                Some(q) => print!("  {:<10.5}", q.rho),
                None => print!("  {:<10}", "> 1/2"),
            }
        }
        println!("  {:.5}", p.rho);
    }
    for (z, c) in zetas.iter().zip(&curves) {
        if let Some(d) = c.truncated_at {
            println!("zeta = {z}: curve leaves rho <= 1/2 at delta = {d:.4}");
        }
    }
}
