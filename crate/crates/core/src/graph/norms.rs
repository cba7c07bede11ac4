use serde::{Deserialize, Serialize};

use super::sparse::SparseSymMatrix;
use crate::error::{Error, Result};

/// Diagonal and row-sum norms of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    /// `max_x |A(x,x)|`
    pub diag_max: f64,
    /// `max_x Σ_y |A(x,y)|`
    pub row_sum: f64,
    /// `max_x Σ_{y≠x} |A(x,y)|`
    pub offdiag_row_sum: f64,
}

pub fn norms(a: &SparseSymMatrix) -> NormReport {
    let mut report = NormReport {
        diag_max: 0.0,
        row_sum: 0.0,
        offdiag_row_sum: 0.0,
    };
    for x in 0..a.n() {
        let mut total = 0.0;
        let mut off = 0.0;
        for (y, w) in a.row(x) {
            total += w.abs();
            if y == x {
                report.diag_max = report.diag_max.max(w.abs());
            } else {
                off += w.abs();
            }
        }
        report.row_sum = report.row_sum.max(total);
        report.offdiag_row_sum = report.offdiag_row_sum.max(off);
    }
    report
}

/// `‖v‖∞ / min_x |v(x)|`.
pub fn kappa(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::Empty);
    }
    let mut max = 0.0f64;
    let mut min = f64::INFINITY;
    for &x in v {
        max = max.max(x.abs());
        min = min.min(x.abs());
    }
    if min == 0.0 {
        return Err(Error::invalid("kappa of a vector with a zero entry"));
    }
    Ok(max / min)
}
