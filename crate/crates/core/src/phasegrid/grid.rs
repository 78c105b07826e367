use std::time::Instant;

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::l1lab::{
    basis_pursuit, gaussian_instance, relative_error, sample_block_signal, sample_simple_signal, sample_tree_signal_on,
    BpOptions, Signal,
};
use crate::models::{BlockClusters, ProblemSize, SparsityModel};
use crate::seeding;

/// A Monte Carlo phase-diagram experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub ambient: usize,
    /// Ascending undersampling ratios in `(0, 1]`.
    pub deltas: Vec<f64>,
    /// Ascending sparsity ratios in `[0, 1]`.
    pub rhos: Vec<f64>,
    pub trials: usize,
    pub model: SparsityModel,
    /// Relative l2 error counted as recovery.
    pub tolerance: f64,
    pub seed: u64,
    pub solver: BpOptions,
}

impl GridSpec {
    pub fn new(ambient: usize, deltas: Vec<f64>, rhos: Vec<f64>, trials: usize, model: SparsityModel, seed: u64) -> Result<Self> {
        let spec = GridSpec { ambient, deltas, rhos, trials, model, tolerance: 1e-4, seed, solver: BpOptions::default() };
        spec.validate()?;
        Ok(spec)
    }

    /// `D x R` grid: `delta_j = j / D` for `j = 1..=D` and `rho_i = i / (R - 1)`
    /// for `i = 0..R` (a single `rho = 0` row when `R = 1`).
    pub fn uniform(ambient: usize, delta_steps: usize, rho_steps: usize, trials: usize, model: SparsityModel, seed: u64) -> Result<Self> {
        if delta_steps == 0 || rho_steps == 0 {
            return domain("grid needs at least one delta and one rho");
        }
        let deltas = (1..=delta_steps).map(|j| j as f64 / delta_steps as f64).collect();
        let rhos = if rho_steps == 1 {
            vec![0.0]
        } else {
            (0..rho_steps).map(|i| i as f64 / (rho_steps - 1) as f64).collect()
        };
        GridSpec::new(ambient, deltas, rhos, trials, model, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ambient == 0 || self.deltas.is_empty() || self.rhos.is_empty() {
            return domain("grid needs N > 0 and non-empty delta and rho lists");
        }
        if self.trials == 0 {
            return domain("grid needs at least one trial per cell");
        }
        let ascending = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !ascending(&self.deltas) || !ascending(&self.rhos) {
            return domain("delta and rho grids must be strictly ascending");
        }
        if self.deltas.iter().any(|&d| !(d > 0.0 && d <= 1.0)) {
            return domain("delta values must lie in (0, 1]");
        }
        if self.rhos.iter().any(|&r| !(0.0..=1.0).contains(&r)) {
            return domain("rho values must lie in [0, 1]");
        }
        if !(self.tolerance > 0.0) {
            return domain("success tolerance must be positive");
        }
        Ok(())
    }

    pub fn cells(&self) -> usize {
        self.deltas.len() * self.rhos.len()
    }

    /// Basis-pursuit calls the full sweep will make.
    pub fn solver_calls(&self) -> usize {
        self.cells() * self.trials
    }
}

/// Integer dimensions of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellDims {
    pub measurements: usize,
    pub sparsity: usize,
    /// Cluster count for block models.
    pub clusters: Option<usize>,
}

/// `n = round(delta N)` (at least 1), `k = max(1, round(rho n))` for
/// `rho > 0`, and `C = max(1, round(zeta k))` for cluster fractions, capped
/// at `N - k + 1` so the clusters still fit with gaps between them.
pub fn cell_dims(ambient: usize, delta: f64, rho: f64, model: &SparsityModel) -> Result<CellDims> {
    let measurements = ((delta * ambient as f64).round() as usize).clamp(1, ambient);
    let sparsity = if rho > 0.0 { ((rho * measurements as f64).round() as usize).clamp(1, measurements) } else { 0 };
    let clusters = match *model {
        SparsityModel::Block(BlockClusters::Fraction(z)) if sparsity > 0 => {
            Some(((z * sparsity as f64).round() as usize).clamp(1, sparsity.min(ambient - sparsity + 1)))
        }
        SparsityModel::Block(BlockClusters::Count(c)) if sparsity > 0 => {
            if c > sparsity {
                return domain(format!("C = {c} clusters cannot hold k = {sparsity} nonzeros"));
            }
            Some(c)
        }
        SparsityModel::Block(_) => Some(0),
        _ => None,
    };
    Ok(CellDims { measurements, sparsity, clusters })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub delta_index: usize,
    pub rho_index: usize,
    pub delta: f64,
    pub rho: f64,
    pub dims: Option<CellDims>,
    pub trials: usize,
    pub successes: usize,
    /// Trials where the solver hit its iteration cap (counted as failures).
    pub nonconverged: usize,
    /// Mean relative error over trials that returned a solution.
    pub mean_rel_err: f64,
    /// Set when the cell could not be run at all.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy)]
enum Trial {
    Solved { rel_err: f64 },
    NonConverged,
    Failed,
}

fn trial_seed(master: u64, di: usize, ri: usize, t: usize) -> u64 {
    seeding::mix(master, &[di as u64, ri as u64, t as u64])
}

fn draw_signal(model: &SparsityModel, ambient: usize, dims: CellDims, seed: u64) -> Result<Signal> {
    let k = dims.sparsity;
    match model {
        SparsityModel::Simple => sample_simple_signal(ambient, k, seed),
        SparsityModel::Block(_) => sample_block_signal(ambient, k, dims.clusters.unwrap_or(1), seed),
        SparsityModel::Tree(_) => sample_tree_signal_on(ambient, k, seed),
    }
}

fn run_trial(spec: &GridSpec, dims: CellDims, seed: u64) -> Trial {
    let Ok(signal) = draw_signal(&spec.model, spec.ambient, dims, seeding::mix(seed, &[1])) else {
        return Trial::Failed;
    };
    let size = match ProblemSize::new(spec.ambient, dims.measurements, dims.sparsity) {
        Ok(s) => s,
        Err(_) => return Trial::Failed,
    };
    let inst = gaussian_instance(size, seeding::mix(seed, &[2]));
    let y = inst.measure(&signal.coefficients);
    match basis_pursuit(&inst, &y, &spec.solver) {
        Ok(sol) => Trial::Solved { rel_err: relative_error(&sol.x, &signal.coefficients) },
        Err(crate::Error::NonConvergence { .. }) => Trial::NonConverged,
        Err(_) => Trial::Failed,
    }
}

fn tally(spec: &GridSpec, di: usize, ri: usize, dims: Result<CellDims>, outcomes: &[Trial]) -> CellResult {
    let (delta, rho) = (spec.deltas[di], spec.rhos[ri]);
    let mut cell = CellResult {
        delta_index: di,
        rho_index: ri,
        delta,
        rho,
        dims: None,
        trials: outcomes.len(),
        successes: 0,
        nonconverged: 0,
        mean_rel_err: f64::NAN,
        error: None,
    };
    match dims {
        Ok(d) => cell.dims = Some(d),
        Err(e) => {
            cell.error = Some(e.to_string());
            return cell;
        }
    }
    let mut sum = 0.0;
    let mut solved = 0;
    for t in outcomes {
        match *t {
            Trial::Solved { rel_err } => {
                solved += 1;
                sum += rel_err;
                if rel_err <= spec.tolerance {
                    cell.successes += 1;
                }
            }
            Trial::NonConverged => cell.nonconverged += 1,
            Trial::Failed => {}
        }
    }
    if solved > 0 {
        cell.mean_rel_err = sum / solved as f64;
    }
    cell
}

/// Runs the trials of one cell; `(di, ri)` are its grid coordinates and fix
/// the trial seeds.
pub fn run_cell(spec: &GridSpec, di: usize, ri: usize) -> CellResult {
    let dims = cell_dims(spec.ambient, spec.deltas[di], spec.rhos[ri], &spec.model);
    let outcomes: Vec<Trial> = match &dims {
        Ok(d) => (0..spec.trials).map(|t| run_trial(spec, *d, trial_seed(spec.seed, di, ri, t))).collect(),
        Err(_) => vec![Trial::Failed; spec.trials],
    };
    tally(spec, di, ri, dims, &outcomes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram {
    pub spec: GridSpec,
    /// Cells in delta-major order: all rho values of `deltas[0]` first.
    pub cells: Vec<CellResult>,
    /// Wall-clock seconds; not part of any serialized output.
    pub elapsed_secs: f64,
}

impl PhaseDiagram {
    pub fn cell(&self, di: usize, ri: usize) -> &CellResult {
        &self.cells[di * self.spec.rhos.len() + ri]
    }

    /// The cells of one delta column, ascending in rho.
    pub fn column(&self, di: usize) -> &[CellResult] {
        let r = self.spec.rhos.len();
        &self.cells[di * r..(di + 1) * r]
    }
}

/// Every cell and trial of the grid, run in parallel; the result does not
/// depend on scheduling.
pub fn run_phase_diagram(spec: &GridSpec) -> Result<PhaseDiagram> {
    spec.validate()?;
    let start = Instant::now();
    let r = spec.rhos.len();
    let dims: Vec<Result<CellDims>> = (0..spec.cells())
        .map(|c| cell_dims(spec.ambient, spec.deltas[c / r], spec.rhos[c % r], &spec.model))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..spec.cells()).flat_map(|c| (0..spec.trials).map(move |t| (c, t))).collect();
    let outcomes: Vec<Trial> = jobs
        .par_iter()
        .map(|&(c, t)| match &dims[c] {
            Ok(d) => run_trial(spec, *d, trial_seed(spec.seed, c / r, c % r, t)),
            Err(_) => Trial::Failed,
        })
        .collect();
    let cells = dims
        .into_iter()
        .enumerate()
        .map(|(c, d)| tally(spec, c / r, c % r, d, &outcomes[c * spec.trials..(c + 1) * spec.trials]))
        .collect();
    Ok(PhaseDiagram { spec: spec.clone(), cells, elapsed_secs: start.elapsed().as_secs_f64() })
}
