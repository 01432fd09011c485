//! Two-sided verification of the spectral identities: report type and
//! suite drivers.
//!
//! Every check in this module and in the evaluator modules produces a
//! [`VerificationReport`]: both sides of an identity computed by
//! independent routes, their absolute and relative disagreement, and a
//! pass flag against the requested tolerance. Suites group the reports
//! by theme so the command-line driver can run and serialize them.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::Serialize;

use crate::real::Real;

/// Outcome of one two-sided identity check.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    /// Name of the check, unique within a suite run.
    pub label: String,
    /// Left-hand side, rounded to `f64` for reporting.
    pub lhs: [f64; 2],
    /// Right-hand side, rounded to `f64` for reporting.
    pub rhs: [f64; 2],
    /// `|lhs - rhs|`, computed at working precision before rounding.
    pub abs_err: f64,
    /// `|lhs - rhs| / |rhs|`; equals `abs_err` when `rhs` vanishes.
    pub rel_err: f64,
    /// Tolerance the check was asked to meet.
    pub tolerance: f64,
    /// `rel_err <= tolerance`, or `abs_err <= tolerance` against a
    /// vanishing right-hand side.
    pub pass: bool,
    /// Evaluation parameters echoed for reproducibility.
    pub config_echo: BTreeMap<String, String>,
}

impl VerificationReport {
    /// Builds a report comparing `lhs` against the reference `rhs`.
    ///
    /// The relative error is measured against `|rhs|`. A right-hand side
    /// below the underflow guard is treated as an exact zero target and
    /// the comparison switches to absolute error, per the vanishing
    /// branches of the identities under test.
    pub fn compare<T: Real>(
        label: impl Into<String>,
        lhs: Complex<T>,
        rhs: Complex<T>,
        tolerance: f64,
    ) -> VerificationReport {
        let abs_err = (lhs - rhs).norm().as_f64();
        let rhs_mag = rhs.norm().as_f64();
        let zero_target = rhs_mag < 1e-250;
        let rel_err = if zero_target { abs_err } else { abs_err / rhs_mag };
        let pass = rel_err <= tolerance;
        VerificationReport {
            label: label.into(),
            lhs: [lhs.re.as_f64(), lhs.im.as_f64()],
            rhs: [rhs.re.as_f64(), rhs.im.as_f64()],
            abs_err,
            rel_err,
            tolerance,
            pass,
            config_echo: BTreeMap::new(),
        }
    }

    /// Attaches one key-value configuration echo entry.
    pub fn with_echo(mut self, key: &str, value: impl ToString) -> Self {
        self.config_echo.insert(key.to_string(), value.to_string());
        self
    }
}
