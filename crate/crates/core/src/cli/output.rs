//! CSV serialization shared by the command line and the examples.

use std::fmt::Write as _;

use crate::face_census::CensusResult;
use crate::phasegrid::{EmpiricalCurve, PhaseDiagram, TheoryReport};
use crate::thresholds::ThresholdCurve;

/// Formats `x` with 12 significant digits, like C's `%.12g`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let mantissa = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub const CURVE_HEADER: &str = "model,param,delta,rho";

/// Rows of one curve (no header).
pub fn curve_rows(curve: &ThresholdCurve, out: &mut String) {
    let (name, param) = (curve.model.name(), curve.model.param_label());
    for p in &curve.points {
        let _ = writeln!(out, "{name},{param},{},{}", fmt_num(p.delta), fmt_num(p.rho));
    }
}

/// Curve CSV with header for any number of curves.
pub fn curves_csv(curves: &[ThresholdCurve]) -> String {
    let mut out = format!("{CURVE_HEADER}\n");
    for c in curves {
        curve_rows(c, &mut out);
    }
    out
}

pub const CENSUS_HEADER: &str = "N,n,k,restriction,instances,faces,survived,loss_fraction,stderr,seed";

pub fn census_row(r: &CensusResult, out: &mut String) {
    let s = &r.spec;
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{}",
        s.ambient,
        s.measurements,
        s.face_dim,
        s.restriction,
        s.instances,
        r.faces_examined,
        r.survived,
        fmt_num(r.loss_fraction),
        fmt_num(r.stderr),
        s.seed
    );
}

pub fn census_csv(results: &[&CensusResult]) -> String {
    let mut out = format!("{CENSUS_HEADER}\n");
    for r in results {
        census_row(r, &mut out);
    }
    out
}

pub const DIAGRAM_HEADER: &str = "N,model,param,delta,rho,n,k,trials,successes,mean_rel_err,seed";

pub fn diagram_csv(d: &PhaseDiagram) -> String {
    let spec = &d.spec;
    let (name, param) = (spec.model.name(), spec.model.param_label());
    let mut out = format!("{DIAGRAM_HEADER}\n");
    for c in &d.cells {
        let (n, k) = match c.dims {
            Some(dims) => (dims.measurements.to_string(), dims.sparsity.to_string()),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{name},{param},{},{},{n},{k},{},{},{},{}",
            spec.ambient,
            fmt_num(c.delta),
            fmt_num(c.rho),
            c.trials,
            c.successes,
            fmt_num(c.mean_rel_err),
            spec.seed
        );
    }
    out
}

pub const EMPIRICAL_HEADER: &str = "delta,rho_hat,ci_lo,ci_hi,method";

pub fn empirical_csv(e: &EmpiricalCurve) -> String {
    let mut out = format!("{EMPIRICAL_HEADER}\n");
    for c in &e.columns {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(c.delta),
            fmt_num(c.rho_hat()),
            fmt_num(c.ci.0),
            fmt_num(c.ci.1),
            c.method
        );
    }
    out
}

pub const REPORT_HEADER: &str = "delta,rho_theory,rho_hat,margin,pass";

pub fn report_csv(r: &TheoryReport) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for row in &r.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(row.delta),
            fmt_num(row.rho_theory),
            fmt_num(row.rho_hat),
            fmt_num(row.margin),
            row.pass
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.1), "0.1");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0 / 3.0 * 1e-3), "0.000666666666667");
        assert_eq!(fmt_num(1e-7), "1e-07");
        assert_eq!(fmt_num(-1.5e20), "-1.5e+20");
        assert_eq!(fmt_num(123456789012.0), "123456789012");
        assert_eq!(fmt_num(1234567890123.0), "1.23456789012e+12");
        assert_eq!(fmt_num(64.0), "64");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }
}
