use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};

use super::SensingInstance;
use crate::error::{domain, Error, Result};

/// Certificates with off-support correlation at or above `1 - SURVIVAL_MARGIN`
/// count as non-survival.
pub const SURVIVAL_MARGIN: f64 = 1e-9;

/// A signed face of the cross-polytope: a support and one sign per index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Face {
    support: Vec<usize>,
    signs: Vec<i8>,
}

impl Face {
    /// Indices are sorted together with their signs; duplicates and zero
    /// signs are rejected.
    pub fn new(support: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        if support.len() != signs.len() {
            return domain("face support and signs differ in length");
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return domain("face signs must be +1 or -1");
        }
        let mut pairs: Vec<(usize, i8)> = support.into_iter().zip(signs).collect();
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return domain("face support has repeated indices");
        }
        let (support, signs) = pairs.into_iter().unzip();
        Ok(Face { support, signs })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Face dimension `k` (support size minus one).
    pub fn dim(&self) -> usize {
        self.support.len().saturating_sub(1)
    }

    /// The same support with every sign flipped.
    pub fn negated(&self) -> Face {
        Face { support: self.support.clone(), signs: self.signs.iter().map(|s| -s).collect() }
    }

    /// Barycenter of the face as a length-`n` vector.
    pub fn barycenter(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        let w = 1.0 / self.support.len() as f64;
        for (&i, &s) in self.support.iter().zip(&self.signs) {
            x[i] = f64::from(s) * w;
        }
        x
    }
}

/// Outcome of the survival test for one face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceVerdict {
    pub survives: bool,
    /// The support columns were linearly dependent (or too many).
    pub rank_deficient: bool,
    /// Smallest achievable off-support correlation; `NaN` when rank deficient.
    pub t_star: f64,
}

/// Whether the face survives projection by the instance matrix.
pub fn face_survives(instance: &SensingInstance, face: &Face) -> Result<FaceVerdict> {
    let a = instance.matrix();
    if face.support.iter().any(|&i| i >= a.ncols()) {
        return domain(format!("face index out of range for N = {}", a.ncols()));
    }
    let deficient = FaceVerdict { survives: false, rank_deficient: true, t_star: f64::NAN };
    if face.support.len() > a.nrows() {
        return Ok(deficient);
    }
    if face.support.is_empty() {
        return Ok(FaceVerdict { survives: true, rank_deficient: false, t_star: 0.0 });
    }
    let sub = a.select_columns(&face.support);
    let sv = sub.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if smin <= 1e-10 * smax.max(f64::MIN_POSITIVE) {
        return Ok(deficient);
    }
    let signs: Vec<f64> = face.signs.iter().map(|&s| f64::from(s)).collect();
    let (t_star, _) = min_off_support_correlation(a, &face.support, &signs)?;
    Ok(FaceVerdict { survives: t_star < 1.0 - SURVIVAL_MARGIN, rank_deficient: false, t_star })
}

/// Solves `min t` over `lambda` with `A_S^T lambda = signs` and
/// `|a_j^T lambda| <= t` off the support.
///
/// The LP solution is projected back onto the equality constraints and `t`
/// is recomputed from it, so the returned value is an attained correlation
/// rather than the solver's reported objective. The support columns must be
/// linearly independent.
pub(crate) fn min_off_support_correlation(
    a: &DMatrix<f64>,
    support: &[usize],
    signs: &[f64],
) -> Result<(f64, DVector<f64>)> {
    let (n, big_n) = a.shape();
    let mut on = vec![false; big_n];
    for &i in support {
        on[i] = true;
    }
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let lambda: Vec<_> = (0..n).map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let t = lp.add_var(1.0, (0.0, f64::INFINITY));
    for (&i, &s) in support.iter().zip(signs) {
        let row: Vec<_> = (0..n).map(|r| (lambda[r], a[(r, i)])).collect();
        lp.add_constraint(&row, ComparisonOp::Eq, s);
    }
    for j in (0..big_n).filter(|&j| !on[j]) {
        let mut row: Vec<_> = (0..n).map(|r| (lambda[r], a[(r, j)])).collect();
        row.push((t, -1.0));
        lp.add_constraint(&row, ComparisonOp::Le, 0.0);
        row[n].1 = 1.0;
        lp.add_constraint(&row, ComparisonOp::Ge, 0.0);
    }
    let lp_failure = |detail: String| Error::NonConvergence { iterations: 0, detail: format!("certificate LP: {detail}") };
    let solution = lp
        .solve()
        .map_err(|e| lp_failure(e.to_string()))?
        .into_solution()
        .map_err(|_| lp_failure("interrupted".into()))?;
    let raw = DVector::from_iterator(n, lambda.iter().map(|&v| solution.var_value(v)));
    let refined = project_onto_signs(a, support, signs, raw)?;
    Ok((off_support_max(a, &on, &refined), refined))
}

/// Moves `lambda` to the nearest point with `A_S^T lambda = signs`.
pub(crate) fn project_onto_signs(
    a: &DMatrix<f64>,
    support: &[usize],
    signs: &[f64],
    lambda: DVector<f64>,
) -> Result<DVector<f64>> {
    let sub = a.select_columns(support);
    let gram = sub.transpose() * &sub;
    let miss = DVector::from_column_slice(signs) - sub.transpose() * &lambda;
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Domain("support columns are linearly dependent".into()))?;
    Ok(lambda + sub * chol.solve(&miss))
}

pub(crate) fn off_support_max(a: &DMatrix<f64>, on: &[bool], lambda: &DVector<f64>) -> f64 {
    a.column_iter()
        .zip(on)
        .filter(|(_, &inside)| !inside)
        .map(|(col, _)| col.dot(lambda).abs())
        .fold(0.0, f64::max)
}
