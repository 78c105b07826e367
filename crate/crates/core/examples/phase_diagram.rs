//! A small Monte Carlo phase diagram with its empirical 50% crossings,
//! compared against the strong-threshold curve.
//!
//! Pass `--full` for the 64-dimensional 12x12 grid with 25 trials per cell.

use ptlab::cli::output::{diagram_csv, empirical_csv, report_csv};
use ptlab::phasegrid::{compare_to_theory, fit_empirical_transition, run_phase_diagram, GridSpec};
use ptlab::thresholds::{sample_curve, ThresholdParams};
use ptlab::SparsityModel;

fn main() {
    let full = std::env::args().any(|a| a == "--full");
    let model = SparsityModel::block_fraction(0.5).unwrap();
    let spec = if full {
        GridSpec::uniform(64, 12, 12, 25, model, 7).unwrap()
    } else {
        GridSpec::uniform(32, 6, 6, 6, model, 7).unwrap()
    };
    let diagram = run_phase_diagram(&spec).unwrap();
    let empirical = fit_empirical_transition(&diagram);
    let curve = sample_curve(&model, 1e-3, 0.5, 200, &ThresholdParams::default()).unwrap();
    let report = compare_to_theory(&empirical, &curve).unwrap();

    if full {
        print!("{}", diagram_csv(&diagram));
    }
    print!("{}", empirical_csv(&empirical));
    print!("{}", report_csv(&report));
    println!("{} solver calls in {:.1} s", spec.solver_calls(), diagram.elapsed_secs);
}
