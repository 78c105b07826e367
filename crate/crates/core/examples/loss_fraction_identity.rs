//! Loss fractions of all faces and of 2-run block faces on shared
//! instances, over a small grid of measurement counts and face dimensions.

use ptlab::face_census::compare_loss_fractions;
use ptlab::ProblemSize;

fn main() {
    println!("{:>3} {:>3} {:>10} {:>10} {:>7}", "n", "k", "all", "block:2", "z");
    for n in [5, 6, 7] {
        for k in [1, 2] {
            let cmp = compare_loss_fractions(ProblemSize::new(9, n, 0).unwrap(), k, 2, 50, 7).unwrap();
            println!(
                "{n:>3} {k:>3} {:>10.4} {:>10.4} {:>7.2}",
                cmp.all.loss_fraction, cmp.block.loss_fraction, cmp.z
            );
        }
    }
}
