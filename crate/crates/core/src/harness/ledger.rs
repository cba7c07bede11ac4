use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::Measure;
use crate::kernel::EquilibriumKernel;
use crate::leja::{
    discrepancy_bound, energy_bound, equal_weight_estimate, quadest_bound, step_minima_range,
    summability_bound, witness_l1, BoundCheck, BoundReplay, DEFAULT_WITNESS_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `|(1/n)Σ f(a_k) − ∫f dν*|` against `3|||G|||‖w‖₁/(n+1)`.
    QuadratureError,
    /// `G(σ_n − ν*, σ_n − ν*)` against `(M − Γ)/n`.
    EnergyDistance,
    /// Summability-weighted potential deviation against `2|||G|||/n`.
    SummabilityDiscrepancy,
    /// `max_x |G(x,ν*) − G(x,σ_n)|` against `3|||G|||/(n+1)`.
    PotentialDiscrepancy,
    /// Averaged step minima against `(nΓ − M)/(n−1)`, from below.
    StepMinimaLower,
    /// Averaged step minima against `Γ`, from above.
    StepMinimaUpper,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::QuadratureError => "quadrature_error",
            Quantity::EnergyDistance => "energy_distance",
            Quantity::SummabilityDiscrepancy => "summability_discrepancy",
            Quantity::PotentialDiscrepancy => "potential_discrepancy",
            Quantity::StepMinimaLower => "step_minima_lower",
            Quantity::StepMinimaUpper => "step_minima_upper",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub n: usize,
    pub quantity: Quantity,
    #[serde(flatten)]
    pub check: BoundCheck,
}

/// Bound checks at every grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundLedger {
    pub rows: Vec<LedgerRow>,
    /// `‖w‖₁` of the witness for `f`; `None` when `f` was not in the range.
    pub witness_l1: Option<f64>,
    pub gamma: f64,
    pub row_sum_norm: f64,
    pub diag_max: f64,
}

impl BoundLedger {
    pub fn failures(&self) -> impl Iterator<Item = &LedgerRow> {
        self.rows.iter().filter(|r| !r.check.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.failures().next().is_none()
    }
}

/// Replays `points` and checks every bound at each `n` in `n_grid`. Failures
/// are reported in the rows, not raised.
pub fn verify_bounds(
    g: &EquilibriumKernel,
    v: &Measure,
    points: &[usize],
    f: Option<&[f64]>,
    n_grid: &[usize],
) -> Result<BoundLedger> {
    let norms = g.norms();
    let norm = norms.row_sum;
    let m = norms.diag_max;
    let scale = norm.max(1.0);

    let witness = match f {
        Some(f) => match witness_l1(g, f, DEFAULT_WITNESS_TOL) {
            Ok(w) => Some((f, v.integrate(f)?, w.l1)),
            Err(e) => {
                log::warn!("no witness for the test function: {e}");
                None
            }
        },
        None => None,
    };

    let mut replay = BoundReplay::new(g, v, points)?;
    let gamma = replay.gamma();
    let mut grid: Vec<usize> = n_grid.iter().copied().filter(|&n| n >= 1).collect();
    grid.sort_unstable();
    grid.dedup();

    let mut rows = Vec::new();
    for n in grid {
        replay.advance_to(n)?;
        let mut push = |quantity, check| rows.push(LedgerRow { n, quantity, check });
        if let Some((f, truth, l1)) = witness {
            let err = (equal_weight_estimate(f, points, n)? - truth).abs();
            push(
                Quantity::QuadratureError,
                BoundCheck::upper(err, quadest_bound(norm, l1, n), scale * l1.max(1.0)),
            );
        }
        push(
            Quantity::EnergyDistance,
            BoundCheck::upper(replay.energy_distance(), energy_bound(m, gamma, n), scale),
        );
        if n >= 2 {
            push(
                Quantity::PotentialDiscrepancy,
                BoundCheck::upper(replay.potential_discrepancy(), discrepancy_bound(norm, n), scale),
            );
            if let Some(d) = replay.summability_discrepancy() {
                push(
                    Quantity::SummabilityDiscrepancy,
                    BoundCheck::upper(d, summability_bound(norm, n), scale),
                );
            }
            if let Some(s) = replay.averaged_step_minima() {
                let (lo, hi) = step_minima_range(gamma, m, n);
                push(Quantity::StepMinimaLower, BoundCheck::lower(s, lo, scale));
                push(Quantity::StepMinimaUpper, BoundCheck::upper(s, hi, scale));
            }
        }
    }
    Ok(BoundLedger {
        rows,
        witness_l1: witness.map(|w| w.2),
        gamma,
        row_sum_norm: norm,
        diag_max: m,
    })
}
