use crate::graph::SparseSymMatrix;

/// A symmetric linear map on vertex functions.
pub trait SymOperator {
    fn dim(&self) -> usize;

    /// `out = A x`; both slices have length [`dim`](Self::dim).
    fn apply(&self, x: &[f64], out: &mut [f64]);

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply(x, &mut out);
        out
    }
}

impl SymOperator for SparseSymMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.matvec_into(x, out)
    }
}
