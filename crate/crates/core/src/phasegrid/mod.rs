//! Monte Carlo phase diagrams over a `(delta, rho)` grid, empirical 50%
//! crossings and their comparison with the strong-threshold curves.

mod compare;
mod fit;
mod grid;

pub use compare::{compare_to_theory, ReportRow, TheoryReport};
pub use fit::{fit_column, fit_empirical_transition, isotonic_nonincreasing, ColumnFit, Crossing, EmpiricalCurve, FitMethod};
pub use grid::{cell_dims, run_cell, run_phase_diagram, CellDims, CellResult, GridSpec, PhaseDiagram};

/// Solver calls above which the command line asks for confirmation.
pub const LARGE_SWEEP: usize = 100_000;
