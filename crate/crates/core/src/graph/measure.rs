use serde::{Deserialize, Serialize};

use super::sparse::SparseSymMatrix;
use crate::error::{Error, Result};

/// Tolerance on `Σ v(x) = 1` for a validated measure.
pub const SUM_TOL: f64 = 1e-12;

/// Strictly positive probability vector on the vertex set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure(Vec<f64>);

impl Measure {
    /// Validates positivity and unit mass.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::check_positive(&values)?;
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidMeasure(format!("entries sum to {sum}, not 1")));
        }
        Ok(Self(values))
    }

    /// Rescales positive weights to unit mass.
    pub fn normalized(values: Vec<f64>) -> Result<Self> {
        Self::check_positive(&values)?;
        let sum: f64 = values.iter().sum();
        Ok(Self(values.into_iter().map(|x| x / sum).collect()))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    fn check_positive(values: &[f64]) -> Result<()> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidMeasure(format!(
                "entry {i} is {v}, must be positive and finite"
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `∫ f dv`.
    pub fn integrate(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                got: f.len(),
            });
        }
        Ok(self.0.iter().zip(f).map(|(v, f)| v * f).sum())
    }
}

impl AsRef<[f64]> for Measure {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Measure proportional to the inverse row sums of `a`, i.e. the inverse of the
/// kernel density estimate.
pub fn inverse_density_measure(a: &SparseSymMatrix) -> Result<Measure> {
    let sums = a.row_sums();
    if let Some((x, s)) = sums.iter().enumerate().find(|(_, s)| !(**s > 0.0)) {
        return Err(Error::InvalidMeasure(format!(
            "row {x} has non-positive sum {s}"
        )));
    }
    Measure::normalized(sums.into_iter().map(|s| 1.0 / s).collect())
}
