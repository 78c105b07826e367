use nalgebra::{DMatrix, DVector};

use super::certificate::{min_off_support_correlation, off_support_max, project_onto_signs};
use super::SensingInstance;
use crate::error::{domain, Error, Result};

/// Stopping rules for [`basis_pursuit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpOptions {
    /// Relative primal/dual residual target.
    pub residual_tol: f64,
    /// Relative iterate change treated as stagnation.
    pub change_tol: f64,
    pub max_iterations: usize,
}

impl Default for BpOptions {
    fn default() -> Self {
        BpOptions { residual_tol: 1e-8, change_tol: 1e-10, max_iterations: 50_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// A dual vector proved optimality of `x` (duality gap at rounding level).
    pub certified: bool,
    /// `||x||_1 - y^T lambda` for the best dual point found, if any.
    pub duality_gap: Option<f64>,
    /// `||A x - y|| / max(1, ||y||)`.
    pub residual: f64,
}

impl BpSolution {
    pub fn l1_norm(&self) -> f64 {
        self.x.iter().map(|v| v.abs()).sum()
    }
}

const POLISH_EVERY: usize = 20;
const BALANCE_EVERY: usize = 10;
const GAP_TOL: f64 = 1e-9;

/// Minimizes `||x||_1` subject to `A x = y`.
///
/// Runs ADMM on the split `x in {A x = y}`, `z = x`, with residual balancing.
/// Whenever the iterate's support changes the solver tries a least-squares
/// fit on that support and checks it against a dual certificate; a certified
/// polish ends the run with the exact minimizer.
pub fn basis_pursuit(instance: &SensingInstance, y: &[f64], opts: &BpOptions) -> Result<BpSolution> {
    let a = instance.matrix();
    let (n, big_n) = a.shape();
    if y.len() != n {
        return domain(format!("measurement length {} does not match n = {n}", y.len()));
    }
    let y = DVector::from_column_slice(y);
    let y_norm = y.norm();
    if y_norm == 0.0 {
        return Ok(BpSolution { x: vec![0.0; big_n], iterations: 0, certified: true, duality_gap: Some(0.0), residual: 0.0 });
    }
    let gram = a * a.transpose();
    let chol = gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Domain("measurement matrix lacks full row rank".into()))?;
    // pseudo-inverse A^T (A A^T)^-1
    let pinv = a.transpose() * chol.inverse();
    let project = |v: &DVector<f64>| -> DVector<f64> { v - &pinv * (a * v - &y) };
    let x_ln = &pinv * &y;

    let scale = x_ln.amax().max(f64::MIN_POSITIVE);
    let mut rho = 10.0 / scale;
    let mut z = x_ln.clone();
    let mut u = DVector::zeros(big_n);
    let mut x = x_ln.clone();
    let mut last_support: Vec<usize> = Vec::new();

    for iter in 1..=opts.max_iterations {
        x = project(&(&z - &u));
        let z_old = z.clone();
        let v = &x + &u;
        let thr = 1.0 / rho;
        z = v.map(|t| t.signum() * (t.abs() - thr).max(0.0));
        u += &x - &z;

        let r_pri = (&x - &z).norm();
        let step = (&z - &z_old).norm();
        let r_dual = rho * step;
        let size = x.norm().max(z.norm()).max(f64::MIN_POSITIVE);
        let eps_pri = opts.residual_tol * size;
        let eps_dual = opts.residual_tol * (rho * u.norm()).max(f64::MIN_POSITIVE);

        if iter % POLISH_EVERY == 0 {
            let support = significant_support(&z);
            if support != last_support {
                if let Some(sol) = polish(a, &y, &chol, &support, &(&u * rho), iter)? {
                    return Ok(sol);
                }
                last_support = support;
            }
        }

        let stalled = step <= opts.change_tol * size && r_pri <= eps_pri;
        if (r_pri <= eps_pri && r_dual <= eps_dual) || stalled {
            let support = significant_support(&z);
            if let Some(sol) = polish(a, &y, &chol, &support, &(&u * rho), iter)? {
                return Ok(sol);
            }
            let w = &u * rho;
            let best_gap = dual_gap(a, &y, &chol, &x, &w);
            let residual = (a * &x - &y).norm() / y_norm.max(1.0);
            let certified = best_gap.is_some_and(|g| g <= GAP_TOL * x.lp_norm(1).max(1.0));
            return Ok(BpSolution { x: x.as_slice().to_vec(), iterations: iter, certified, duality_gap: best_gap, residual });
        }

        if iter % BALANCE_EVERY == 0 {
            if r_pri > 10.0 * r_dual {
                rho *= 2.0;
                u /= 2.0;
            } else if r_dual > 10.0 * r_pri {
                rho /= 2.0;
                u *= 2.0;
            }
        }
    }
    let r_pri = (&x - &z).norm();
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        detail: format!("basis pursuit: primal residual {r_pri:.3e}"),
    })
}

fn significant_support(z: &DVector<f64>) -> Vec<usize> {
    let cut = 1e-9 * z.amax();
    z.iter().enumerate().filter(|(_, v)| v.abs() > cut && **v != 0.0).map(|(i, _)| i).collect()
}

/// Least-squares fit on `support`, returned only if a dual certificate proves
/// it optimal.
fn polish(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>,
    support: &[usize],
    w: &DVector<f64>,
    iter: usize,
) -> Result<Option<BpSolution>> {
    let (n, big_n) = a.shape();
    if support.is_empty() || support.len() > n {
        return Ok(None);
    }
    let sub = a.select_columns(support);
    let svd = sub.clone().svd(true, true);
    if svd.singular_values.min() <= 1e-10 * svd.singular_values.max() {
        return Ok(None);
    }
    let coef = match svd.solve(y, 0.0) {
        Ok(c) => c,
        Err(_) => return Ok(None),
    };
    let y_norm = y.norm();
    let residual = (&sub * &coef - y).norm() / y_norm.max(1.0);
    if residual > 1e-9 || coef.iter().any(|v| *v == 0.0) {
        return Ok(None);
    }
    let mut x = DVector::zeros(big_n);
    for (&i, &c) in support.iter().zip(coef.iter()) {
        x[i] = c;
    }
    let l1 = x.lp_norm(1);
    let limit = GAP_TOL * l1.max(1.0);
    let mut gap = dual_gap(a, y, chol, &x, w);
    if !gap.is_some_and(|g| g <= limit) {
        let signs: Vec<f64> = coef.iter().map(|v| v.signum()).collect();
        let (t, lambda) = min_off_support_correlation(a, support, &signs)?;
        gap = Some(l1 - y.dot(&lambda) / t.max(1.0));
    }
    Ok(match gap {
        Some(g) if g <= limit => Some(BpSolution {
            x: x.as_slice().to_vec(),
            iterations: iter,
            certified: true,
            duality_gap: Some(g),
            residual,
        }),
        _ => None,
    })
}

/// Best duality gap from the ADMM dual estimate `w` (a subgradient of the
/// l1 norm at the iterate), tried both as is and projected onto the sign
/// constraints of `x`'s support.
fn dual_gap(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>,
    x: &DVector<f64>,
    w: &DVector<f64>,
) -> Option<f64> {
    let l1 = x.lp_norm(1);
    let base = chol.solve(&(a * w));
    let mut candidates = vec![base.clone()];
    let cut = 1e-9 * x.amax();
    let support: Vec<usize> = (0..x.len()).filter(|&i| x[i].abs() > cut).collect();
    if !support.is_empty() && support.len() <= a.nrows() {
        let signs: Vec<f64> = support.iter().map(|&i| x[i].signum()).collect();
        if let Ok(p) = project_onto_signs(a, &support, &signs, base) {
            candidates.push(p);
        }
    }
    let none = vec![false; a.ncols()];
    candidates
        .into_iter()
        .map(|lambda| {
            let c = off_support_max(a, &none, &lambda);
            l1 - y.dot(&lambda) / c.max(1.0)
        })
        .filter(|g| g.is_finite())
        .reduce(f64::min)
}
