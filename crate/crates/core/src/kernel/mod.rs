//! Kernels with a prescribed equilibrium measure.
//!
//! Given a symmetric `B` and a target measure `v`, each construction returns a
//! kernel `G` with `G v = Γ 𝟙`, so that `v` has constant potential.

pub mod equilibrium;
pub mod householder;
pub mod laplacian;
pub mod operator;
pub mod scaling;
pub mod serialize;

use serde::{Deserialize, Serialize};

pub use equilibrium::{
    verify_equilibrium, EquilibriumKernel, EquilibriumReport, KernelBody, Method, RankOne,
};
pub use householder::{householder_b1, householder_kernel, null_vector, Householder};
pub use laplacian::{diag_modified_kernel, v_laplacian, DiagMode};
pub use operator::SymOperator;
pub use scaling::{
    brualdi_check, pagerank_augment, scaled_kernel, sinkhorn_kernel, sinkhorn_scale,
    PagerankMatrix, ScalingResult, DEFAULT_ALPHA, DEFAULT_SINKHORN_MAX_ITER, DEFAULT_SINKHORN_TOL,
};
pub use serialize::{kernel_fingerprint, read_kernel, write_kernel};

use crate::error::Result;
use crate::graph::{Measure, SparseSymMatrix};

/// Parameters for [`build_kernel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelOptions {
    pub method: Method,
    pub alpha: f64,
    pub sinkhorn_tol: f64,
    pub sinkhorn_max_iter: usize,
    /// Seed for the null-vector search.
    pub seed: u64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            method: Method::Sinkhorn,
            alpha: DEFAULT_ALPHA,
            sinkhorn_tol: DEFAULT_SINKHORN_TOL,
            sinkhorn_max_iter: DEFAULT_SINKHORN_MAX_ITER,
            seed: 0,
        }
    }
}

/// Builds a kernel for `v` from `b` with the chosen construction.
pub fn build_kernel(b: &SparseSymMatrix, v: &Measure, opts: &KernelOptions) -> Result<EquilibriumKernel> {
    match opts.method {
        Method::DiagStrict => diag_modified_kernel(b, v, DiagMode::Strict),
        Method::DiagGraph => diag_modified_kernel(b, v, DiagMode::GraphPreserving),
        Method::Householder => householder_kernel(b, v, opts.seed),
        Method::Sinkhorn => {
            if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
                return Err(crate::error::Error::invalid(format!(
                    "sinkhorn kernel needs alpha in (0, 1), got {}",
                    opts.alpha
                )));
            }
            let (k, s) = sinkhorn_kernel(b, v, opts.alpha, opts.sinkhorn_tol, opts.sinkhorn_max_iter)?;
            log::debug!(
                "sinkhorn converged in {} iterations, residual {:e}",
                s.iterations,
                s.residual
            );
            Ok(k)
        }
    }
}
