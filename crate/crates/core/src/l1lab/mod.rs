//! Gaussian sensing matrices, structured random signals, basis pursuit and
//! the face-survival certificate.

mod certificate;
mod ensemble;
mod pursuit;
mod signals;

pub use certificate::{face_survives, Face, FaceVerdict, SURVIVAL_MARGIN};
pub use ensemble::{gaussian_instance, Ensemble, SensingInstance};
pub use pursuit::{basis_pursuit, BpOptions, BpSolution};
pub use signals::{
    sample_block_signal, sample_simple_signal, sample_tree_signal, sample_tree_signal_on, Provenance, Signal,
};

/// Relative l2 distance `||estimate - truth|| / ||truth||`; absolute distance
/// when the truth is zero.
pub fn relative_error(estimate: &[f64], truth: &[f64]) -> f64 {
    let diff: f64 = estimate.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = truth.iter().map(|b| b * b).sum::<f64>().sqrt();
    if norm == 0.0 {
        diff
    } else {
        diff / norm
    }
}
