//! Phase transitions of structured sparse signals.
//!
//! The crate covers four layers that build on each other:
//!
//! * [`models`]: sparsity models (simple, `(K, C)` block, connected tree),
//!   exact subspace counts with brute-force enumerators, cross-polytope face
//!   counts and combinatorial prefactors.
//! * [`thresholds`]: leading-order net exponents and the strong-threshold
//!   curves `rho(delta)` / `delta(rho)` for every model.
//! * [`l1lab`]: Gaussian sensing ensembles, structured signal samplers, basis
//!   pursuit and exact face-survival certificates.
//! * [`face_census`] and [`phasegrid`]: brute-force face-survival censuses and
//!   Monte Carlo phase diagrams compared against the theoretical curves.
//!
//! [`cli`] wires everything to the `ptlab` binary and its CSV/SVG outputs.

pub mod cli;
pub mod error;
pub mod face_census;
pub mod l1lab;
pub mod models;
pub mod phasegrid;
pub mod seeding;
pub mod thresholds;

pub use error::{Error, Result};
pub use models::{BlockClusters, Count, ProblemSize, SparsityModel, TreeRegime};
pub use thresholds::{PhasePoint, ThresholdCurve, ThresholdParams};
