use std::fmt;

use super::PhaseDiagram;
use crate::models::SparsityModel;

/// The 50% success crossing of one column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    Point(f64),
    /// Success stays at or above 1/2 over the whole column.
    LowerBound(f64),
    /// Success is below 1/2 already at the smallest level.
    UpperBound(f64),
}

impl Crossing {
    pub fn value(&self) -> f64 {
        match *self {
            Crossing::Point(v) | Crossing::LowerBound(v) | Crossing::UpperBound(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    Logistic,
    /// Linear interpolation of the isotonic staircase.
    Interpolated,
    LowerBound,
    UpperBound,
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitMethod::Logistic => "logistic",
            FitMethod::Interpolated => "interpolated",
            FitMethod::LowerBound => "lower_bound",
            FitMethod::UpperBound => "upper_bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnFit {
    pub delta: f64,
    pub crossing: Crossing,
    /// 95% interval (Wald for logistic fits, bracketing levels otherwise).
    pub ci: (f64, f64),
    pub method: FitMethod,
    /// The point estimate falls outside the rho grid's hull.
    pub extrapolated: bool,
    /// Non-increasing success probabilities per rho level.
    pub isotonic: Vec<f64>,
    /// Logistic intercept and slope, when fitted.
    pub coefficients: Option<(f64, f64)>,
}

impl ColumnFit {
    pub fn rho_hat(&self) -> f64 {
        self.crossing.value()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCurve {
    pub model: SparsityModel,
    pub ambient: usize,
    pub columns: Vec<ColumnFit>,
}

/// Weighted pool-adjacent-violators fit, constrained non-increasing.
pub fn isotonic_nonincreasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    assert_eq!(values.len(), weights.len());
    // blocks of (mean, weight, length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() > 1 {
            let (m2, w2, l2) = blocks[blocks.len() - 1];
            let (m1, w1, l1) = blocks[blocks.len() - 2];
            if m1 >= m2 {
                break;
            }
            let w = w1 + w2;
            let m = if w > 0.0 { (m1 * w1 + m2 * w2) / w } else { (m1 + m2) / 2.0 };
            blocks.truncate(blocks.len() - 2);
            blocks.push((m, w, l1 + l2));
        }
    }
    blocks.into_iter().flat_map(|(m, _, l)| std::iter::repeat_n(m, l)).collect()
}

const Z95: f64 = 1.959_963_984_540_054;

/// Fits the 50% crossing of success counts against ascending `rhos`.
///
/// A logistic maximum-likelihood fit is used when failures and successes
/// overlap (some failure at a level below some success); otherwise the
/// likelihood has no finite maximizer and the isotonic staircase is
/// interpolated instead.
pub fn fit_column(delta: f64, rhos: &[f64], successes: &[usize], trials: &[usize]) -> ColumnFit {
    assert!(rhos.len() == successes.len() && rhos.len() == trials.len() && !rhos.is_empty());
    let props: Vec<f64> =
        successes.iter().zip(trials).map(|(&s, &t)| if t == 0 { 0.0 } else { s as f64 / t as f64 }).collect();
    let weights: Vec<f64> = trials.iter().map(|&t| t as f64).collect();
    let isotonic = isotonic_nonincreasing(&props, &weights);
    let (lo, hi) = (rhos[0], rhos[rhos.len() - 1]);

    let min_fail = (0..rhos.len()).filter(|&i| successes[i] < trials[i]).map(|i| rhos[i]).reduce(f64::min);
    let max_success = (0..rhos.len()).filter(|&i| successes[i] > 0).map(|i| rhos[i]).reduce(f64::max);
    let overlap = matches!((min_fail, max_success), (Some(f), Some(s)) if f < s);
    let levels = rhos.len();

    if overlap && levels >= 2 {
        if let Some((b0, b1, cov)) = logistic_fit(rhos, successes, trials) {
            if b1 < 0.0 {
                let est = -b0 / b1;
                let g = [-1.0 / b1, b0 / (b1 * b1)];
                let var = g[0] * g[0] * cov[0][0] + 2.0 * g[0] * g[1] * cov[0][1] + g[1] * g[1] * cov[1][1];
                let half = Z95 * var.max(0.0).sqrt();
                return ColumnFit {
                    delta,
                    crossing: Crossing::Point(est),
                    ci: (est - half, est + half),
                    method: FitMethod::Logistic,
                    extrapolated: est < lo || est > hi,
                    isotonic,
                    coefficients: Some((b0, b1)),
                };
            }
        }
    }

    let base = |crossing, ci, method| ColumnFit {
        delta,
        crossing,
        ci,
        method,
        extrapolated: false,
        isotonic: isotonic.clone(),
        coefficients: None,
    };
    if isotonic[0] < 0.5 {
        return base(Crossing::UpperBound(lo), (f64::NEG_INFINITY, lo), FitMethod::UpperBound);
    }
    match (0..levels - 1).find(|&i| isotonic[i] >= 0.5 && isotonic[i + 1] < 0.5) {
        Some(i) => {
            let (p0, p1) = (isotonic[i], isotonic[i + 1]);
            let est = rhos[i] + (p0 - 0.5) / (p0 - p1) * (rhos[i + 1] - rhos[i]);
            base(Crossing::Point(est), (rhos[i], rhos[i + 1]), FitMethod::Interpolated)
        }
        None => base(Crossing::LowerBound(hi), (hi, f64::INFINITY), FitMethod::LowerBound),
    }
}

/// Newton/IRLS for `logit p = b0 + b1 rho`; returns the coefficients and
/// their inverse-information covariance, or `None` if it fails to settle.
fn logistic_fit(rhos: &[f64], successes: &[usize], trials: &[usize]) -> Option<(f64, f64, [[f64; 2]; 2])> {
    let (mut b0, mut b1) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let (mut g0, mut g1, mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((&r, &s), &t) in rhos.iter().zip(successes).zip(trials) {
            let t = t as f64;
            let p = 1.0 / (1.0 + (-(b0 + b1 * r)).exp());
            let resid = s as f64 - t * p;
            let w = t * p * (1.0 - p);
            g0 += resid;
            g1 += resid * r;
            h00 += w;
            h01 += w * r;
            h11 += w * r * r;
        }
        let det = h00 * h11 - h01 * h01;
        if !(det.abs() > 1e-300) {
            return None;
        }
        let d0 = (h11 * g0 - h01 * g1) / det;
        let d1 = (h00 * g1 - h01 * g0) / det;
        b0 += d0;
        b1 += d1;
        if !(b0.is_finite() && b1.is_finite()) {
            return None;
        }
        if d0.abs() < 1e-10 * (1.0 + b0.abs()) && d1.abs() < 1e-10 * (1.0 + b1.abs()) {
            let cov = [[h11 / det, -h01 / det], [-h01 / det, h00 / det]];
            return Some((b0, b1, cov));
        }
    }
    None
}

/// Per-column crossings of a phase diagram.
pub fn fit_empirical_transition(diagram: &PhaseDiagram) -> EmpiricalCurve {
    let spec = &diagram.spec;
    let columns = (0..spec.deltas.len())
        .map(|di| {
            let col = diagram.column(di);
            let successes: Vec<usize> = col.iter().map(|c| c.successes).collect();
            let trials: Vec<usize> = col.iter().map(|c| c.trials).collect();
            fit_column(spec.deltas[di], &spec.rhos, &successes, &trials)
        })
        .collect();
    EmpiricalCurve { model: spec.model, ambient: spec.ambient, columns }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RHOS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];

    #[test]
    fn pava_pools_violators() {
        let fit = isotonic_nonincreasing(&[1.0, 0.6, 0.8, 0.2, 0.3], &[1.0; 5]);
        assert_eq!(fit, vec![1.0, 0.7, 0.7, 0.25, 0.25]);
        let w = isotonic_nonincreasing(&[0.2, 0.8], &[3.0, 1.0]);
        assert!((w[0] - 0.35).abs() < 1e-15 && (w[1] - 0.35).abs() < 1e-15);
    }

    #[test]
    fn separated_column_interpolates_staircase() {
        let fit = fit_column(0.5, &RHOS, &[25, 25, 13, 0, 0], &[25; 5]);
        assert_eq!(fit.method, FitMethod::Interpolated);
        assert!((fit.rho_hat() - (0.3 + 0.02 / 0.52 * 0.1)).abs() < 1e-12);
        assert!(fit.ci.0 <= 0.3 && 0.3 <= fit.ci.1);
    }

    #[test]
    fn overlapping_column_uses_logistic() {
        let fit = fit_column(0.5, &RHOS, &[25, 22, 13, 4, 0], &[25; 5]);
        assert_eq!(fit.method, FitMethod::Logistic);
        assert!((fit.rho_hat() - 0.3).abs() < 0.02, "{}", fit.rho_hat());
        assert!(fit.ci.0 < 0.3 && 0.3 < fit.ci.1);
    }

    #[test]
    fn one_sided_columns_give_bounds() {
        let up = fit_column(0.5, &RHOS, &[25; 5], &[25; 5]);
        assert_eq!(up.crossing, Crossing::LowerBound(0.5));
        let down = fit_column(0.5, &RHOS, &[0; 5], &[25; 5]);
        assert_eq!(down.crossing, Crossing::UpperBound(0.1));
    }
}
