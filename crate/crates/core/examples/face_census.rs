//! Face-survival census of the projected cross-polytope, and the paired
//! comparison of all faces against block-structured faces.

use ptlab::face_census::{compare_loss_fractions, face_count, run_census, CensusSpec, FaceRestriction};
use ptlab::ProblemSize;

fn main() {
    let (n_amb, k) = (9, 1);
    let faces = face_count(n_amb, k, FaceRestriction::All).unwrap().exact().unwrap();
    println!("{faces} faces of dimension {k} in C^{n_amb}");
    for n in [5, 6, 7, 9] {
        let spec = CensusSpec::new(n_amb, n, k, FaceRestriction::All).instances(40).seed(1);
        let r = run_census(&spec).unwrap();
        println!("n = {n}: loss fraction {:.4} +/- {:.4} over {} faces", r.loss_fraction, r.stderr, r.faces_examined);
    }

    let cmp = compare_loss_fractions(ProblemSize::new(9, 6, 0).unwrap(), 1, 2, 60, 42).unwrap();
    println!(
        "all {:.4} vs block:2 {:.4}, paired z = {:.2} ({})",
        cmp.all.loss_fraction,
        cmp.block.loss_fraction,
        cmp.z,
        if cmp.pass { "within 3 sigma" } else { "differ" }
    );
}
