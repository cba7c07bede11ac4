//! Uniform augmentation, symmetric Sinkhorn scaling and the scaled kernel.

use serde::{Deserialize, Serialize};

use super::equilibrium::{EquilibriumKernel, KernelBody, Method, RankOne};
use super::operator::SymOperator;
use crate::error::{Error, Result};
use crate::graph::{Measure, SparseSymMatrix};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_SINKHORN_TOL: f64 = 1e-10;
pub const DEFAULT_SINKHORN_MAX_ITER: usize = 100_000;
/// Largest `‖Gv − 𝟙‖∞` accepted by [`scaled_kernel`].
pub const SCALED_KERNEL_MAX_DEV: f64 = 1e-6;
/// Largest order accepted by [`brualdi_check`].
pub const BRUALDI_MAX_N: usize = 15;

/// `(1 − α) B + (α / N) 𝟙𝟙ᵀ`, applied without forming the dense term.
#[derive(Debug, Clone, PartialEq)]
pub struct PagerankMatrix {
    base: SparseSymMatrix,
    alpha: f64,
}

impl PagerankMatrix {
    pub fn base(&self) -> &SparseSymMatrix {
        &self.base
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        (1.0 - self.alpha) * self.base.get(x, y) + self.alpha / self.base.n() as f64
    }
}

impl SymOperator for PagerankMatrix {
    fn dim(&self) -> usize {
        self.base.n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.base.matvec_into(x, out);
        let shift = self.alpha * x.iter().sum::<f64>() / self.base.n() as f64;
        for o in out.iter_mut() {
            *o = (1.0 - self.alpha) * *o + shift;
        }
    }
}

/// Augments a non-negative symmetric `B` to an all-positive matrix.
pub fn pagerank_augment(b: &SparseSymMatrix, alpha: f64) -> Result<PagerankMatrix> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    if !b.is_nonnegative() {
        return Err(Error::invalid("pagerank augmentation needs a non-negative matrix"));
    }
    Ok(PagerankMatrix {
        base: b.clone(),
        alpha,
    })
}

/// Diagonal `d` with `diag(d) · B · diag(d) · 𝟙 ≈ v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub d: Vec<f64>,
    pub iterations: usize,
    /// `‖d ⊙ (B d) − v‖∞` at exit.
    pub residual: f64,
    /// Steps at which the residual did not decrease.
    pub nonmonotone_steps: usize,
}

/// Symmetric Sinkhorn iteration `d ← sqrt(d ⊙ v ⊘ (B d))` from
/// `d₀ = sqrt(v ⊘ B𝟙)`, stopping once `‖d ⊙ (B d) ⊘ v − 𝟙‖∞ ≤ tol`. This
/// residual equals `max_x |G(x, v) − 1|` for the scaled kernel.
pub fn sinkhorn_scale<O: SymOperator + ?Sized>(
    b: &O,
    v: &Measure,
    tol: f64,
    max_iter: usize,
) -> Result<ScalingResult> {
    let n = b.dim();
    if v.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: v.len(),
        });
    }
    let v = v.values();
    let mut bd = b.apply_vec(&vec![1.0; n]);
    check_positive(&bd, 0)?;
    let mut d: Vec<f64> = v.iter().zip(&bd).map(|(vi, s)| (vi / s).sqrt()).collect();

    let mut prev = f64::INFINITY;
    let mut nonmonotone_steps = 0;
    for iter in 0..=max_iter {
        b.apply(&d, &mut bd);
        check_positive(&bd, iter)?;
        let residual = d
            .iter()
            .zip(&bd)
            .zip(v)
            .map(|((di, t), vi)| (di * t / vi - 1.0).abs())
            .fold(0.0, f64::max);
        if residual > prev {
            nonmonotone_steps += 1;
            log::debug!("sinkhorn residual rose at iteration {iter}: {prev:e} -> {residual:e}");
        }
        prev = residual;
        if residual <= tol {
            return Ok(ScalingResult {
                d,
                iterations: iter,
                residual,
                nonmonotone_steps,
            });
        }
        if iter == max_iter {
            return Err(Error::NoConvergence {
                iterations: max_iter,
                residual,
            });
        }
        for ((di, t), vi) in d.iter_mut().zip(&bd).zip(v) {
            *di = (*di * vi / t).sqrt();
        }
    }
    unreachable!("loop returns on its last iteration")
}

fn check_positive(bd: &[f64], iter: usize) -> Result<()> {
    if let Some(x) = bd.iter().position(|t| !(*t > 0.0)) {
        return Err(Error::Degenerate(format!(
            "scaled row sum at vertex {x} vanished at iteration {iter}"
        )));
    }
    Ok(())
}

/// Kernel `V⁻¹ D B̃ D V⁻¹` split as `(1 − α) V⁻¹DBDV⁻¹ + (α/N) c cᵀ` with
/// `c = d ⊘ v`. `Gv = 𝟙`, so the capacity is recorded as exactly 1.
pub fn scaled_kernel(b: &SparseSymMatrix, d: &[f64], v: &Measure, alpha: f64) -> Result<EquilibriumKernel> {
    let n = b.n();
    for len in [d.len(), v.len()] {
        if len != n {
            return Err(Error::Dimension { expected: n, got: len });
        }
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha = {alpha} must lie in [0, 1)")));
    }
    if let Some(x) = d.iter().position(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::invalid(format!("scaling entry {x} is not positive")));
    }
    let c: Vec<f64> = d.iter().zip(v.values()).map(|(di, vi)| di / vi).collect();
    let sparse = b.map_entries(|x, y, w| (1.0 - alpha) * w * (c[x] * c[y]));
    let rank_one = (alpha > 0.0).then(|| RankOne::new(alpha / n as f64, c));
    let kernel = EquilibriumKernel::assemble(
        Method::Sinkhorn,
        KernelBody::Structured { sparse, rank_one },
        alpha,
        1.0,
        v.clone(),
        Some(d.to_vec()),
    )?;
    if kernel.capacity_deviation > SCALED_KERNEL_MAX_DEV {
        return Err(Error::NoConvergence {
            iterations: 0,
            residual: kernel.capacity_deviation,
        });
    }
    Ok(kernel)
}

/// Scales `B` (augmented when `alpha > 0`) against `v` and builds the kernel.
pub fn sinkhorn_kernel(
    b: &SparseSymMatrix,
    v: &Measure,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(EquilibriumKernel, ScalingResult)> {
    let scaling = if alpha > 0.0 {
        sinkhorn_scale(&pagerank_augment(b, alpha)?, v, tol, max_iter)?
    } else {
        sinkhorn_scale(b, v, tol, max_iter)?
    };
    let kernel = scaled_kernel(b, &scaling.d, v, alpha)?;
    Ok((kernel, scaling))
}

/// Exhaustive check of the partition condition under which a positive
/// diagonal scaling `D B D 𝟙 = v` exists: for every partition `(S₁, S₂, S₃)`
/// with `B[S₂ ∪ S₃, S₃] = 0`, `v(S₁) ≥ v(S₃)`, with equality exactly when
/// `B[S₁, S₁ ∪ S₂] = 0`. Exponential in `n`.
pub fn brualdi_check(b: &SparseSymMatrix, v: &Measure) -> Result<bool> {
    let n = b.n();
    if v.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: v.len(),
        });
    }
    if n > BRUALDI_MAX_N {
        return Err(Error::invalid(format!(
            "partition enumeration limited to n <= {BRUALDI_MAX_N}, got {n}"
        )));
    }
    // nz[y]: bitmask of x with B(x, y) != 0.
    let nz: Vec<u32> = (0..n)
        .map(|y| b.row(y).fold(0u32, |m, (x, _)| m | (1 << x)))
        .collect();
    let mass = |mask: u32| -> f64 {
        (0..n)
            .filter(|&x| mask & (1 << x) != 0)
            .map(|x| v.values()[x])
            .sum()
    };
    let all: u32 = (1u32 << n) - 1;
    let block_zero = |rows: u32, cols: u32| -> bool {
        (0..n)
            .filter(|&x| rows & (1 << x) != 0)
            .all(|x| nz[x] & cols == 0)
    };

    // Enumerate S₃, then S₁ ⊆ complement; S₂ is the rest.
    for s3 in 0..=all {
        let rest = all & !s3;
        let mut s1: u32 = rest;
        loop {
            let s2 = rest & !s1;
            if block_zero(s3, s2 | s3) {
                let (m1, m3) = (mass(s1), mass(s3));
                let equal = (m1 - m3).abs() <= 1e-12;
                if m1 < m3 && !equal {
                    return Ok(false);
                }
                if equal != block_zero(s1, s1 | s2) {
                    return Ok(false);
                }
            }
            if s1 == 0 {
                break;
            }
            s1 = (s1 - 1) & rest;
        }
    }
    Ok(true)
}
