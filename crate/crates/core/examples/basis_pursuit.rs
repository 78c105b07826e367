//! Basis pursuit on a block-sparse signal, and the dual certificate that
//! predicts whether its face survives.

use ptlab::l1lab::{
    basis_pursuit, face_survives, gaussian_instance, relative_error, sample_block_signal, BpOptions, Face,
};
use ptlab::ProblemSize;

fn main() {
    let size = ProblemSize::new(64, 32, 4).unwrap();
    let mut recovered = 0;
    for trial in 0..20u64 {
        let inst = gaussian_instance(size, 1000 + trial);
        let signal = sample_block_signal(64, 4, 2, 2000 + trial).unwrap();
        let y = inst.measure(&signal.coefficients);
        let sol = basis_pursuit(&inst, &y, &BpOptions::default()).unwrap();
        let err = relative_error(&sol.x, &signal.coefficients);

        let signs = signal.support.iter().map(|&i| if signal.coefficients[i] > 0.0 { 1 } else { -1 }).collect();
        let face = Face::new(signal.support.clone(), signs).unwrap();
        let verdict = face_survives(&inst, &face).unwrap();
        if err <= 1e-4 {
            recovered += 1;
        }
        println!(
            "trial {trial:2}: support {:?} rel err {err:.1e}, {} iterations, certificate t* = {:.4}",
            signal.support, sol.iterations, verdict.t_star
        );
    }
    println!("recovered {recovered} of 20");
}
