//! Exact and log-domain binomial coefficients.

use crate::error::{domain, Result};

/// A combinatorial count: exact while it fits in 128 bits, log-scale beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Count {
    Exact(u128),
    /// The exact value overflowed; only `ln(count)` is available.
    Overflow { ln: f64 },
}

impl Count {
    pub fn exact(&self) -> Option<u128> {
        match *self {
            Count::Exact(v) => Some(v),
            Count::Overflow { .. } => None,
        }
    }

    /// Natural log of the count (`-inf` for zero).
    pub fn ln(&self) -> f64 {
        match *self {
            Count::Exact(0) => f64::NEG_INFINITY,
            Count::Exact(v) => (v as f64).ln(),
            Count::Overflow { ln } => ln,
        }
    }

    pub fn is_overflow(&self) -> bool {
        matches!(self, Count::Overflow { .. })
    }

    /// Product of two counts, degrading to log scale on overflow.
    pub fn mul(self, other: Count) -> Count {
        match (self, other) {
            (Count::Exact(a), Count::Exact(b)) => match a.checked_mul(b) {
                Some(v) => Count::Exact(v),
                None => Count::Overflow { ln: self.ln() + other.ln() },
            },
            (Count::Exact(0), _) | (_, Count::Exact(0)) => Count::Exact(0),
            _ => Count::Overflow { ln: self.ln() + other.ln() },
        }
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exact `C(n, k)`, or `None` if it does not fit in `u128`.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) / (i + 1) is exact and equals C(n, i + 1)
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        let g = gcd(c, den);
        let (c_red, den_red) = (c / g, den / g);
        c = c_red.checked_mul(num / den_red)?;
    }
    Some(c)
}

/// `C(n, k)` as a [`Count`].
pub fn binomial_count(n: u64, k: u64) -> Count {
    match binomial_u128(n, k) {
        Some(v) => Count::Exact(v),
        None => Count::Overflow { ln: ln_choose(n, k) },
    }
}

// Stirling remainder ln Γ(x+1) - [(x+½)ln x - x + ½ln 2π], valid for x >= 32.
fn stirling_tail(x: f64) -> f64 {
    let x2 = x * x;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * x2)) / x2) / x2) / x
}

const SMALL_SIDE: u64 = 32;

fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    if k < SMALL_SIDE {
        // sum of k short logs; no large cancellation
        let mut acc = 0.0;
        for i in 0..k {
            acc += ((n - i) as f64 / (i + 1) as f64).ln();
        }
        return acc;
    }
    let m = n - k;
    let (nf, kf, mf) = (n as f64, k as f64, m as f64);
    // k ln(n/k) + m ln(n/m), written with ln_1p so neither term loses digits
    let main = kf * (mf / kf).ln_1p() + mf * (kf / mf).ln_1p();
    let half = 0.5 * (nf / (2.0 * std::f64::consts::PI * kf * mf)).ln();
    main + half + stirling_tail(nf) - stirling_tail(kf) - stirling_tail(mf)
}

/// Natural log of `C(n, k)`.
///
/// Small sides are summed term by term; otherwise the three Stirling series
/// are combined before subtracting, so the result keeps full relative
/// precision instead of inheriting the rounding of `ln n!`.
pub fn log_binomial(n: i64, k: i64) -> Result<f64> {
    if n < 0 || k < 0 {
        return domain(format!("log_binomial({n}, {k}): negative argument"));
    }
    if k > n {
        return domain(format!("log_binomial({n}, {k}): k exceeds n"));
    }
    Ok(ln_choose(n as u64, k as u64))
}
