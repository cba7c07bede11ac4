//! Diagonal-modification kernels built on the v-Laplacian.

use serde::{Deserialize, Serialize};

use super::equilibrium::{EquilibriumKernel, KernelBody, Method};
use crate::error::{Error, Result};
use crate::graph::{norms, Measure, SparseSymMatrix};

/// Which diagonal shift to apply on top of the v-Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagMode {
    /// Shift by `2|||B₁|||`; diagonally dominant for any symmetric `B`.
    Strict,
    /// Shift by `2|||B|||`; requires non-negative connected `B` and keeps
    /// every entry non-negative.
    GraphPreserving,
}

impl DiagMode {
    /// Graph-preserving when `B` is non-negative and connected, strict
    /// otherwise.
    pub fn auto(b: &SparseSymMatrix) -> Self {
        if b.is_nonnegative() && b.is_connected() {
            DiagMode::GraphPreserving
        } else {
            DiagMode::Strict
        }
    }
}

/// `L_v(B) = W − B` with `W = diag((Bv)(x) / v(x))`, so that `L_v(B) v = 0`.
pub fn v_laplacian(b: &SparseSymMatrix, v: &Measure) -> Result<SparseSymMatrix> {
    if b.n() != v.len() {
        return Err(Error::Dimension {
            expected: b.n(),
            got: v.len(),
        });
    }
    let bv = b.matvec(v.values())?;
    let w: Vec<f64> = bv.iter().zip(v.values()).map(|(a, x)| a / x).collect();
    let entries = b
        .upper_entries()
        .map(|(i, j, x)| (i, j, -x))
        .chain(w.iter().enumerate().map(|(i, &wi)| (i, i, wi)));
    SparseSymMatrix::from_entries(b.n(), entries)
}

/// `shift · V⁻¹ − B₁` with `V = diag(v / ‖v‖∞)`; the potential of `v` is
/// `shift · ‖v‖∞` everywhere.
pub(crate) fn shifted_inverse_measure(
    b1: &SparseSymMatrix,
    v: &Measure,
    shift: f64,
) -> Result<SparseSymMatrix> {
    let vmax = v.max();
    let diag = v.values().iter().map(|&x| shift * vmax / x);
    let entries = b1
        .upper_entries()
        .map(|(i, j, x)| (i, j, -x))
        .chain(diag.enumerate().map(|(i, d)| (i, i, d)));
    SparseSymMatrix::from_entries(b1.n(), entries)
}

/// Kernel `G = 2s V⁻¹ − L_v(B)`, with `s = |||L_v(B)|||` (strict) or
/// `s = |||B|||` (graph preserving). `Gv = 2‖v‖∞ s · 𝟙` and `Γ(G) = 2‖v‖∞ s`.
pub fn diag_modified_kernel(b: &SparseSymMatrix, v: &Measure, mode: DiagMode) -> Result<EquilibriumKernel> {
    let b1 = v_laplacian(b, v)?;
    let (shift, method) = match mode {
        DiagMode::Strict => (norms(&b1).row_sum, Method::DiagStrict),
        DiagMode::GraphPreserving => {
            if !b.is_nonnegative() {
                return Err(Error::invalid("graph-preserving kernel needs a non-negative matrix"));
            }
            if !b.is_connected() {
                return Err(Error::invalid("graph-preserving kernel needs a connected graph"));
            }
            (norms(b).row_sum, Method::DiagGraph)
        }
    };
    if shift == 0.0 {
        return Err(Error::Degenerate(
            "v-Laplacian is identically zero".to_string(),
        ));
    }
    let g = shifted_inverse_measure(&b1, v, 2.0 * shift)?;
    let capacity = 2.0 * v.max() * shift;
    EquilibriumKernel::assemble(
        method,
        KernelBody::Structured {
            sparse: g,
            rank_one: None,
        },
        0.0,
        capacity,
        v.clone(),
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::kappa;
    use crate::kernel::SymOperator;

    fn swap() -> SparseSymMatrix {
        SparseSymMatrix::from_dense(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn v_laplacian_worked_example() {
        let v = Measure::uniform(2).unwrap();
        let b1 = v_laplacian(&swap(), &v).unwrap();
        assert_eq!(b1.to_dense(), vec![1.0, -1.0, -1.0, 1.0]);
        assert_eq!(b1.matvec(v.values()).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn v_laplacian_of_zero() {
        let z = SparseSymMatrix::zeros(3).unwrap();
        let b1 = v_laplacian(&z, &Measure::uniform(3).unwrap()).unwrap();
        assert_eq!(b1.nnz(), 0);
    }

    #[test]
    fn strict_worked_example() {
        let v = Measure::uniform(2).unwrap();
        let g = diag_modified_kernel(&swap(), &v, DiagMode::Strict).unwrap();
        assert_eq!(g.to_dense(), vec![3.0, 1.0, 1.0, 3.0]);
        assert_eq!(g.capacity, 2.0);
        assert_eq!(g.apply_vec(v.values()), vec![2.0, 2.0]);
        assert_eq!(g.method, Method::DiagStrict);
    }

    #[test]
    fn degenerate_laplacian_is_error() {
        let z = SparseSymMatrix::zeros(2).unwrap();
        let v = Measure::uniform(2).unwrap();
        assert!(matches!(
            diag_modified_kernel(&z, &v, DiagMode::Strict),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn graph_preserving_needs_connected_nonnegative() {
        let v = Measure::uniform(3).unwrap();
        let split = SparseSymMatrix::from_entries(3, [(0, 1, 1.0)]).unwrap();
        assert!(diag_modified_kernel(&split, &v, DiagMode::GraphPreserving).is_err());
        let neg = SparseSymMatrix::from_entries(3, [(0, 1, 1.0), (1, 2, -1.0)]).unwrap();
        assert!(diag_modified_kernel(&neg, &v, DiagMode::GraphPreserving).is_err());
        assert_eq!(DiagMode::auto(&neg), DiagMode::Strict);
    }

    #[test]
    fn regular_graph_uniform_measure_keeps_pattern() {
        let c5 = SparseSymMatrix::from_entries(5, (0..5).map(|i| (i, (i + 1) % 5, 1.0))).unwrap();
        let v = Measure::uniform(5).unwrap();
        let g = diag_modified_kernel(&c5, &v, DiagMode::GraphPreserving).unwrap();
        for x in 0..5 {
            for y in 0..5 {
                if x != y {
                    assert_eq!(g.entry(x, y), c5.get(x, y));
                }
            }
        }
        let d0 = g.entry(0, 0);
        assert!((0..5).all(|x| g.entry(x, x) == d0));
        // Γ = 2‖v‖∞|||B||| = 2 · (1/5) · 2
        assert!((g.capacity - 0.8).abs() < 1e-15);
    }

    #[test]
    fn norm_estimate_on_small_example() {
        let b = SparseSymMatrix::from_entries(3, [(0, 1, 2.0), (1, 2, 0.5), (0, 0, 1.0)]).unwrap();
        let v = Measure::new(vec![0.2, 0.3, 0.5]).unwrap();
        let b1 = v_laplacian(&b, &v).unwrap();
        let lhs = norms(&b1).row_sum;
        let rhs = (kappa(v.values()).unwrap() + 1.0) * norms(&b).row_sum;
        assert!(lhs <= rhs);
    }
}
