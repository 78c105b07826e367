use super::fit::{Crossing, EmpiricalCurve};
use crate::error::{domain, Result};
use crate::thresholds::{rho_of_delta, ThresholdCurve};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub delta: f64,
    pub rho_theory: f64,
    pub rho_hat: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryReport {
    pub rows: Vec<ReportRow>,
    /// Columns outside the curve's delta range.
    pub skipped: Vec<f64>,
    pub warnings: Vec<String>,
}

impl TheoryReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Checks `rho_hat >= rho_theory` at every empirical column inside the
/// curve's delta range.
///
/// Lower bounds pass when the bound itself clears the theory; an upper bound
/// never passes because the crossing could sit anywhere below it.
pub fn compare_to_theory(empirical: &EmpiricalCurve, curve: &ThresholdCurve) -> Result<TheoryReport> {
    let Some((lo, hi)) = curve.delta_range() else {
        return domain("threshold curve has no points");
    };
    let mut warnings = Vec::new();
    if empirical.model != curve.model {
        warnings.push(format!("model mismatch: empirical {} vs theory {}", empirical.model, curve.model));
    }
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for col in &empirical.columns {
        if col.delta < lo || col.delta > hi {
            skipped.push(col.delta);
            continue;
        }
        let theory = rho_of_delta(&curve.model, col.delta, &curve.params)?;
        let rho_hat = col.rho_hat();
        let pass = match col.crossing {
            Crossing::Point(v) | Crossing::LowerBound(v) => v >= theory,
            Crossing::UpperBound(_) => false,
        };
        rows.push(ReportRow { delta: col.delta, rho_theory: theory, rho_hat, margin: rho_hat - theory, pass });
    }
    if rows.is_empty() {
        return domain(format!("no empirical column falls inside the curve's delta range [{lo}, {hi}]"));
    }
    Ok(TheoryReport { rows, skipped, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasegrid::fit::{ColumnFit, FitMethod};
    use crate::thresholds::{sample_curve, ThresholdParams};
    use crate::SparsityModel;

    fn column(delta: f64, crossing: Crossing) -> ColumnFit {
        ColumnFit {
            delta,
            crossing,
            ci: (0.0, 1.0),
            method: FitMethod::Interpolated,
            extrapolated: false,
            isotonic: vec![],
            coefficients: None,
        }
    }

    #[test]
    fn pass_flags_and_warnings() {
        let curve = sample_curve(&SparsityModel::Simple, 0.01, 0.3, 20, &ThresholdParams::default()).unwrap();
        let emp = EmpiricalCurve {
            model: SparsityModel::block_fraction(0.5).unwrap(),
            ambient: 64,
            columns: vec![
                column(0.1, Crossing::Point(0.3)),
                column(0.2, Crossing::Point(0.01)),
                column(0.25, Crossing::UpperBound(0.9)),
                column(0.9, Crossing::Point(0.5)),
            ],
        };
        let rep = compare_to_theory(&emp, &curve).unwrap();
        assert_eq!(rep.rows.iter().map(|r| r.pass).collect::<Vec<_>>(), vec![true, false, false]);
        assert_eq!(rep.skipped, vec![0.9]);
        assert_eq!(rep.warnings.len(), 1);
        assert!(rep.rows[0].margin > 0.0);
    }

    #[test]
    fn disjoint_ranges_are_rejected() {
        let curve = sample_curve(&SparsityModel::Simple, 0.01, 0.1, 5, &ThresholdParams::default()).unwrap();
        let emp = EmpiricalCurve { model: SparsityModel::Simple, ambient: 64, columns: vec![column(0.5, Crossing::Point(0.3))] };
        assert!(compare_to_theory(&emp, &curve).is_err());
    }
}
