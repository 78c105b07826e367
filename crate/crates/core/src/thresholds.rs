//! Strong-threshold curves for simple, block and tree sparsity.
//!
//! With `z = (delta sqrt(pi))^{-1}` the leading-order net exponent of every
//! model has the form
//!
//! ```text
//! M(delta, rho) = delta / 2 * [a rho + ln rho + ln ln z + ln(2e)]
//! ```
//!
//! where the structure coefficient `a` is `2(zeta - 1)` for `(K, C)` blocks
//! with cluster fraction `zeta`, `2 ln 2` for trees counted with the
//! `k < log2 N` bound, `2(ln 4 - 1)` for trees counted with the `k >= log2 N`
//! bound, and `0` for simple sparsity. The strong threshold is the first zero
//! of `M` in `rho`, equivalently the smallest root of
//!
//! ```text
//! rho = exp(b rho) / |tau ln(delta sqrt(pi))|,   b = -a,  tau = 2e,
//! ```
//!
//! whose explicit inverse is `delta = exp(-exp(b rho) / (tau rho)) / sqrt(pi)`.
//! Both numerical routes are exposed so they can be checked against each
//! other. Only `rho <= 1/2` and `delta < 1/sqrt(pi)` are in the validity
//! domain of the small-delta expansion.

use std::f64::consts::{E, LN_2, PI};

use crate::error::{domain, Error, Result};
use crate::models::{model_error, BlockClusters, SparsityModel, TreeRegime};

/// `1/sqrt(pi)`: the largest undersampling ratio where `ln ln z` exists.
pub const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;
/// Upper end of the `rho` validity domain.
pub const RHO_MAX: f64 = 0.5;
const RHO_MIN: f64 = 1e-12;
const MAX_FIXED_POINT_ITERS: usize = 10_000;
const RESIDUAL_TOL: f64 = 1e-10;

/// Threshold constant and validity cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams {
    pub tau: f64,
    pub delta_max: f64,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        ThresholdParams { tau: 2.0 * E, delta_max: INV_SQRT_PI }
    }
}

impl ThresholdParams {
    pub fn new(tau: f64, delta_max: f64) -> Result<Self> {
        if !(tau >= 2.0 * E) {
            return domain(format!("tau must be at least 2e, got {tau}"));
        }
        if !(delta_max > 0.0 && delta_max <= INV_SQRT_PI) {
            return domain(format!("delta_max must lie in (0, 1/sqrt(pi)], got {delta_max}"));
        }
        Ok(ThresholdParams { tau, delta_max })
    }
}

/// A point `(delta, rho)` of the phase plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub delta: f64,
    pub rho: f64,
}

impl PhasePoint {
    pub fn new(delta: f64, rho: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) || !(rho > 0.0 && rho < 1.0) {
            return domain(format!("phase point ({delta}, {rho}) outside the open unit square"));
        }
        Ok(PhasePoint { delta, rho })
    }
}

/// Argument of an exponent inside the maximization rectangle:
/// `v = l/N` in `[delta, 1]`, `gamma = k/l` in `[0, rho]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPoint {
    pub v: f64,
    pub gamma: f64,
}

/// The coefficient `a` of the linear structure term `a rho`.
///
/// Tree `Auto` resolves to the large-`k` regime: under proportional growth
/// `k = rho delta N` eventually exceeds `log2 N`.
pub fn exponent_coefficient(model: &SparsityModel) -> Result<f64> {
    match *model {
        SparsityModel::Simple => Ok(0.0),
        SparsityModel::Block(BlockClusters::Fraction(zeta)) => Ok(2.0 * (zeta - 1.0)),
        SparsityModel::Block(BlockClusters::Count(_)) => {
            model_error("threshold curves need a cluster fraction zeta, not a fixed count")
        }
        SparsityModel::Tree(TreeRegime::SmallK) => Ok(2.0 * LN_2),
        SparsityModel::Tree(TreeRegime::LargeK | TreeRegime::Auto) => Ok(2.0 * (4f64.ln() - 1.0)),
    }
}

/// The structure term `a rho` of the net exponent.
pub fn structure_rate(model: &SparsityModel, rho: f64) -> Result<f64> {
    Ok(exponent_coefficient(model)? * rho)
}

/// Leading-order net exponent `delta/2 [a rho + ln rho + ln ln z + ln 2e]`.
pub fn net_exponent_leading(model: &SparsityModel, point: PhasePoint) -> Result<f64> {
    let PhasePoint { delta, rho } = point;
    let ln_z = -(delta * PI.sqrt()).ln();
    if !(ln_z > 0.0) {
        return domain(format!("ln ln z undefined at delta = {delta} >= 1/sqrt(pi)"));
    }
    let a = exponent_coefficient(model)?;
    Ok(0.5 * delta * (a * rho + rho.ln() + ln_z.ln() + (2.0 * E).ln()))
}

const GRID: usize = 64;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// `sup { psi(v, gamma) : v in [delta, 1], gamma in [0, rho] }`.
///
/// A 64 x 64 scan locates the best cell, then alternating golden-section
/// searches refine inside the neighbouring cells.
pub fn maximize_exponent<F>(psi: F, delta: f64, rho: f64) -> Result<f64>
where
    F: Fn(ExponentPoint) -> Result<f64>,
{
    if !(delta > 0.0 && delta <= 1.0) || !(0.0..=1.0).contains(&rho) {
        return domain(format!("maximization rectangle needs delta in (0,1], rho in [0,1]; got ({delta}, {rho})"));
    }
    let hv = (1.0 - delta) / (GRID - 1) as f64;
    let hg = rho / (GRID - 1) as f64;
    let mut best = (f64::NEG_INFINITY, delta, 0.0);
    for i in 0..GRID {
        let v = if i == GRID - 1 { 1.0 } else { delta + i as f64 * hv };
        for j in 0..GRID {
            let gamma = if j == GRID - 1 { rho } else { j as f64 * hg };
            let val = psi(ExponentPoint { v, gamma })?;
            if val > best.0 {
                best = (val, v, gamma);
            }
        }
    }
    let (v_lo, v_hi) = ((best.1 - hv).max(delta), (best.1 + hv).min(1.0));
    let (g_lo, g_hi) = ((best.2 - hg).max(0.0), (best.2 + hg).min(rho));
    let (mut value, mut v, mut gamma) = best;
    for _ in 0..60 {
        let before = value;
        let (nv, fv) = golden_max(|x| psi(ExponentPoint { v: x, gamma }), v_lo, v_hi)?;
        if fv > value {
            value = fv;
            v = nv;
        }
        let (ng, fg) = golden_max(|x| psi(ExponentPoint { v, gamma: x }), g_lo, g_hi)?;
        if fg > value {
            value = fg;
            gamma = ng;
        }
        if value - before <= 1e-15 * value.abs().max(1.0) {
            break;
        }
    }
    Ok(value)
}

fn golden_max<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    // endpoints matter when the maximum sits on the rectangle boundary
    let mut best = if fc > fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x)?;
        if fx > best.1 {
            best = (x, fx);
        }
    }
    Ok(best)
}

fn check_delta(delta: f64, params: &ThresholdParams) -> Result<()> {
    if !(delta > 0.0 && delta < params.delta_max) {
        return domain(format!("delta = {delta} outside (0, {})", params.delta_max));
    }
    Ok(())
}

/// First zero in `rho` of the leading net exponent, found by scanning
/// `(1e-12, 1/2]` for the first sign change and bisecting it.
pub fn threshold_first_zero(model: &SparsityModel, delta: f64, params: &ThresholdParams) -> Result<f64> {
    check_delta(delta, params)?;
    let f = |rho: f64| net_exponent_leading(model, PhasePoint { delta, rho });
    const SCAN: usize = 512;
    let ratio = (RHO_MAX / RHO_MIN).ln();
    let mut lo = RHO_MIN;
    if f(lo)? >= 0.0 {
        return Err(Error::NoTransition { delta });
    }
    let mut hi = None;
    for i in 1..SCAN {
        let rho = if i == SCAN - 1 { RHO_MAX } else { RHO_MIN * (ratio * i as f64 / (SCAN - 1) as f64).exp() };
        if f(rho)? >= 0.0 {
            hi = Some(rho);
            break;
        }
        lo = rho;
    }
    let mut hi = hi.ok_or(Error::NoTransition { delta })?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn curve_rate(model: &SparsityModel) -> Result<f64> {
    Ok(-exponent_coefficient(model)?)
}

/// Explicit `delta(rho) = exp(-exp(b rho) / (tau rho)) / sqrt(pi)`.
pub fn delta_of_rho(model: &SparsityModel, rho: f64, params: &ThresholdParams) -> Result<f64> {
    if !(rho > 0.0 && rho <= RHO_MAX) {
        return domain(format!("rho = {rho} outside (0, 1/2]"));
    }
    let b = curve_rate(model)?;
    Ok((-(b * rho).exp() / (params.tau * rho)).exp() / PI.sqrt())
}

/// `rho - exp(b rho) / |tau ln(delta sqrt(pi))|`; zero on the threshold curve.
pub fn implicit_residual(model: &SparsityModel, point: PhasePoint, params: &ThresholdParams) -> Result<f64> {
    let b = curve_rate(model)?;
    let l = params.tau * (point.delta * PI.sqrt()).ln().abs();
    Ok(point.rho - (b * point.rho).exp() / l)
}

/// Smallest root of `rho = exp(b rho) / |tau ln(delta sqrt(pi))|` in
/// `(0, 1/2]`, by damped fixed-point iteration with a bisection fallback.
pub fn rho_of_delta(model: &SparsityModel, delta: f64, params: &ThresholdParams) -> Result<f64> {
    check_delta(delta, params)?;
    let b = curve_rate(model)?;
    let l = -params.tau * (delta * PI.sqrt()).ln();
    let map = |r: f64| (b * r).exp() / l;
    let g = |r: f64| map(r) - r;

    // g(0) > 0; g is decreasing up to its minimum (b > 0) or everywhere (b <= 0)
    let mut hi = RHO_MAX;
    if b > 0.0 {
        let turn = (l / b).ln() / b;
        if turn > 0.0 && turn < hi {
            hi = turn;
        }
    }
    if g(hi) > 0.0 {
        return Err(Error::NoTransition { delta });
    }

    let mut rho = map(0.0).min(hi);
    let mut converged = false;
    for _ in 0..MAX_FIXED_POINT_ITERS {
        let step = g(rho);
        if step.abs() <= 1e-15 * rho.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        let omega = (1.0 / (1.0 - b * map(rho))).clamp(0.05, 1.0);
        let next = rho + omega * step;
        if !(next > 0.0 && next <= hi) {
            break;
        }
        rho = next;
    }
    if !converged {
        let mut lo = 0.0;
        let mut up = hi;
        for _ in 0..MAX_FIXED_POINT_ITERS {
            let mid = 0.5 * (lo + up);
            if mid <= lo || mid >= up {
                break;
            }
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                up = mid;
            }
        }
        rho = 0.5 * (lo + up);
    }
    let residual = g(rho);
    if !(residual.abs() <= RESIDUAL_TOL) {
        return Err(Error::NonConvergence {
            iterations: MAX_FIXED_POINT_ITERS,
            detail: format!("threshold at delta = {delta}: residual {residual:e} at rho = {rho}"),
        });
    }
    Ok(rho)
}

/// Delta spacing for sampled curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Geometric,
    Linear,
}

/// A sampled strong-threshold curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCurve {
    pub model: SparsityModel,
    pub params: ThresholdParams,
    pub spacing: Spacing,
    pub requested_points: usize,
    /// Samples in strictly increasing `delta`.
    pub points: Vec<PhasePoint>,
    /// First requested `delta` whose threshold leaves `rho <= 1/2`; the
    /// curve stops there.
    pub truncated_at: Option<f64>,
}

impl ThresholdCurve {
    pub fn delta_range(&self) -> Option<(f64, f64)> {
        Some((self.points.first()?.delta, self.points.last()?.delta))
    }

    /// Largest `|implicit_residual|` over the samples.
    pub fn max_residual(&self) -> Result<f64> {
        self.points.iter().try_fold(0.0f64, |acc, p| {
            Ok(acc.max(implicit_residual(&self.model, *p, &self.params)?.abs()))
        })
    }
}

/// Requested sample positions in `[lo, hi]`, endpoints exact.
pub fn delta_grid(lo: f64, hi: f64, points: usize, spacing: Spacing) -> Vec<f64> {
    (0..points)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == points - 1 {
                hi
            } else {
                let t = i as f64 / (points - 1) as f64;
                match spacing {
                    Spacing::Geometric => lo * (hi / lo).powf(t),
                    Spacing::Linear => lo + t * (hi - lo),
                }
            }
        })
        .collect()
}

/// Geometrically spaced curve on `[delta_min, delta_max_req]`.
pub fn sample_curve(
    model: &SparsityModel,
    delta_min: f64,
    delta_max_req: f64,
    points: usize,
    params: &ThresholdParams,
) -> Result<ThresholdCurve> {
    sample_curve_with(model, delta_min, delta_max_req, points, Spacing::Geometric, params)
}

pub fn sample_curve_with(
    model: &SparsityModel,
    delta_min: f64,
    delta_max_req: f64,
    points: usize,
    spacing: Spacing,
    params: &ThresholdParams,
) -> Result<ThresholdCurve> {
    if !(delta_min > 0.0 && delta_min < delta_max_req && delta_max_req <= params.delta_max) {
        return domain(format!(
            "curve range needs 0 < {delta_min} < {delta_max_req} <= {}",
            params.delta_max
        ));
    }
    if points < 2 {
        return domain("a curve needs at least 2 points");
    }
    exponent_coefficient(model)?;
    // delta_max itself is excluded from the open domain of rho_of_delta
    let cap = delta_max_req.min(params.delta_max * (1.0 - 1e-15));
    let mut out = Vec::with_capacity(points);
    let mut truncated_at = None;
    for delta in delta_grid(delta_min, cap, points, spacing) {
        match rho_of_delta(model, delta, params) {
            Ok(rho) => out.push(PhasePoint { delta, rho }),
            Err(Error::NoTransition { .. }) => {
                truncated_at = Some(delta);
                break;
            }
            Err(e) => return Err(Error::AtDelta { delta, source: Box::new(e) }),
        }
    }
    Ok(ThresholdCurve { model: *model, params: *params, spacing, requested_points: points, points: out, truncated_at })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(z: f64) -> SparsityModel {
        SparsityModel::block_fraction(z).unwrap()
    }
    const SMALL: SparsityModel = SparsityModel::Tree(TreeRegime::SmallK);
    const LARGE: SparsityModel = SparsityModel::Tree(TreeRegime::LargeK);

    #[test]
    fn structure_rates() {
        assert_eq!(structure_rate(&block(1.0), 0.3).unwrap(), 0.0);
        assert!((structure_rate(&SMALL, 0.1).unwrap() - 0.138_629_436_111_989).abs() < 1e-12);
        assert!((structure_rate(&LARGE, 0.1).unwrap() - 0.077_258_872_223_978).abs() < 1e-12);
        assert_eq!(structure_rate(&SparsityModel::Simple, 0.4).unwrap(), 0.0);
        assert!(structure_rate(&SparsityModel::block_count(2).unwrap(), 0.1).is_err());
    }

    #[test]
    fn delta_of_rho_values() {
        // high-precision reference values of exp(-exp(b rho)/(2 e rho))/sqrt(pi)
        let p = ThresholdParams::default();
        let cases = [
            (block(1.0), 0.089_657_166_024_252_21),
            (block(0.5), 0.073_887_379_652_430_13),
            (SMALL, 0.113_761_262_324_161_3),
            (LARGE, 0.102_796_566_149_055_93),
        ];
        for (m, want) in cases {
            assert!((delta_of_rho(&m, 0.1, &p).unwrap() - want).abs() < 1e-14, "{m}");
        }
        assert!(delta_of_rho(&SMALL, 0.0, &p).is_err());
        assert!(delta_of_rho(&SMALL, 0.6, &p).is_err());
    }

    #[test]
    fn rho_of_delta_inverts() {
        let p = ThresholdParams::default();
        let rho = rho_of_delta(&block(1.0), 0.08966, &p).unwrap();
        assert!((rho - 0.1).abs() < 1e-4);
        let simple = rho_of_delta(&SparsityModel::Simple, 0.0897, &p).unwrap();
        assert!((simple - 0.100_025_973_885_595_56).abs() < 1e-12);
        assert!(rho_of_delta(&SMALL, 1e-200, &p).unwrap() < 1e-2);
        assert!(matches!(rho_of_delta(&block(0.25), 0.5, &p), Err(Error::NoTransition { .. })));
        assert!(rho_of_delta(&SMALL, 0.6, &p).is_err());
    }

    #[test]
    fn first_zero_matches_fixed_point() {
        let p = ThresholdParams::default();
        let fz = threshold_first_zero(&SparsityModel::Simple, 0.0897, &p).unwrap();
        assert!((fz - 0.1).abs() < 1e-3);
        let fz_block = threshold_first_zero(&block(1.0), 0.0897, &p).unwrap();
        assert!((fz - fz_block).abs() < 1e-12);
        let s = threshold_first_zero(&SMALL, 0.05, &p).unwrap();
        let l = threshold_first_zero(&LARGE, 0.05, &p).unwrap();
        assert!(s < l);
    }

    #[test]
    fn net_exponent_near_zero_on_the_curve() {
        let delta = 0.01;
        let rho = 1.0 / (2.0 * E * (delta * PI.sqrt()).ln().abs());
        let v = net_exponent_leading(&SparsityModel::Simple, PhasePoint::new(delta, rho).unwrap()).unwrap();
        assert!(v.abs() <= 0.05 * delta);
        let tiny = net_exponent_leading(&SMALL, PhasePoint::new(0.1, 1e-300).unwrap()).unwrap();
        assert!(tiny < -300.0 * 0.05);
        // 2(zeta - 1) rho is more negative for zeta = 0.5
        let pt = PhasePoint::new(0.1, 0.2).unwrap();
        assert!(net_exponent_leading(&block(0.5), pt).unwrap() < net_exponent_leading(&block(1.0), pt).unwrap());
        assert!(net_exponent_leading(&SMALL, PhasePoint::new(0.57, 0.2).unwrap()).is_err());
    }

    #[test]
    fn maximizer_examples() {
        let c = maximize_exponent(|_| Ok(1.25), 0.2, 0.3).unwrap();
        assert_eq!(c, 1.25);
        let delta = 0.2;
        let q = maximize_exponent(|p| Ok(-(p.v - delta).powi(2) - p.gamma.powi(2)), delta, 0.3).unwrap();
        assert!(q.abs() < 1e-12);
        // interior maximum off the grid
        let m = maximize_exponent(|p| Ok(-(p.v - 0.4321).powi(2) - (p.gamma - 0.1234).powi(2)), 0.1, 0.5).unwrap();
        assert!(m.abs() < 1e-8);
        // the leading exponent frozen at the boundary v = delta, gamma = rho
        let pt = PhasePoint::new(0.05, 0.07).unwrap();
        let frozen = maximize_exponent(
            |e| {
                let rho = e.gamma.max(f64::MIN_POSITIVE);
                net_exponent_leading(&LARGE, PhasePoint { delta: pt.delta, rho })
            },
            pt.delta,
            pt.rho,
        )
        .unwrap();
        assert!((frozen - net_exponent_leading(&LARGE, pt).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn curves() {
        let p = ThresholdParams::default();
        let c = sample_curve(&SparsityModel::Simple, 1e-3, 0.3, 2, &p).unwrap();
        assert_eq!(c.points.len(), 2);
        assert_eq!(c.points[0].delta, 1e-3);
        assert_eq!(c.points[1].delta, 0.3);
        let c = sample_curve(&block(0.25), 1e-3, 0.5, 200, &p).unwrap();
        assert!(c.truncated_at.is_some());
        assert!(c.points.windows(2).all(|w| w[0].delta < w[1].delta && w[0].rho < w[1].rho));
        assert!(c.max_residual().unwrap() <= 1e-9);
        assert!(sample_curve(&SMALL, 0.3, 0.2, 10, &p).is_err());
        assert!(sample_curve(&SMALL, 0.1, 0.2, 1, &p).is_err());
        assert!(sample_curve(&SMALL, 0.1, 0.6, 10, &p).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(ThresholdParams::new(5.0, 0.5).is_err());
        assert!(ThresholdParams::new(6.0, 0.6).is_err());
        assert!(ThresholdParams::new(6.0, 0.5).is_ok());
        assert!(PhasePoint::new(0.0, 0.5).is_err());
    }
}
