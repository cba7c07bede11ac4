//! Householder reflection kernels for singular matrices.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::equilibrium::{EquilibriumKernel, KernelBody, Method};
use crate::error::{Error, Result};
use crate::graph::{norms, Measure, SparseSymMatrix};

const UNIT_TOL: f64 = 1e-10;
/// Largest order for which the dense null-vector search is attempted.
pub const NULL_VECTOR_DENSE_LIMIT: usize = 4000;
const NULL_VECTOR_ITERS: usize = 200;
const NULL_VECTOR_REG: f64 = 1e-12;
const NULL_VECTOR_TOL: f64 = 1e-8;

/// Reflection `I − 2 (w−u)(w−u)ᵀ / ‖w−u‖²`, applied as a rank-one update.
#[derive(Debug, Clone, PartialEq)]
pub struct Householder {
    diff: Vec<f64>,
    scale: f64,
    identity: bool,
}

impl Householder {
    /// Reflection exchanging the unit vectors `w` and `u`. When they coincide
    /// the identity is returned with [`is_identity`](Self::is_identity) set.
    pub fn new(w: &[f64], u: &[f64]) -> Result<Self> {
        if w.len() != u.len() {
            return Err(Error::Dimension {
                expected: w.len(),
                got: u.len(),
            });
        }
        for (name, x) in [("w", w), ("u", u)] {
            let norm = l2(x);
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(Error::invalid(format!("{name} is not a unit vector (norm {norm})")));
            }
        }
        let diff: Vec<f64> = w.iter().zip(u).map(|(a, b)| a - b).collect();
        let sq: f64 = diff.iter().map(|d| d * d).sum();
        if sq == 0.0 {
            return Ok(Self {
                diff,
                scale: 0.0,
                identity: true,
            });
        }
        Ok(Self {
            diff,
            scale: 2.0 / sq,
            identity: false,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn dim(&self) -> usize {
        self.diff.len()
    }

    pub fn apply_in_place(&self, x: &mut [f64]) {
        if self.identity {
            return;
        }
        let dot: f64 = self.diff.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        let s = self.scale * dot;
        for (xi, d) in x.iter_mut().zip(&self.diff) {
            *xi -= s * d;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        self.apply_in_place(&mut out);
        out
    }
}

fn l2(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Unit `u` with `‖Bu‖₂ ≤ 1e-8 · max(1, |||B|||)`, by inverse iteration on
/// `B + δI` from a seeded random start.
pub fn null_vector(b: &SparseSymMatrix, seed: u64) -> Result<Vec<f64>> {
    let n = b.n();
    if n > NULL_VECTOR_DENSE_LIMIT {
        return Err(Error::invalid(format!(
            "null-vector search is dense; n = {n} exceeds {NULL_VECTOR_DENSE_LIMIT}"
        )));
    }
    let scale = norms(b).row_sum.max(1.0);
    let tol = NULL_VECTOR_TOL * scale;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = l2(&u);
    u.iter_mut().for_each(|x| *x /= norm);

    let residual = |u: &[f64]| l2(&b.matvec(u).expect("dimension checked"));
    let mut best = residual(&u);
    if best <= tol {
        return Ok(u);
    }

    let dense = DMatrix::from_row_slice(n, n, &b.to_dense());
    let mut reg = NULL_VECTOR_REG * scale;
    let mut lu = (&dense + DMatrix::identity(n, n) * reg).lu();
    for _ in 0..NULL_VECTOR_ITERS {
        let rhs = DVector::from_column_slice(&u);
        let x = loop {
            match lu.solve(&rhs) {
                Some(x) if x.iter().all(|v| v.is_finite()) => break x,
                _ => {
                    reg *= 10.0;
                    lu = (&dense + DMatrix::identity(n, n) * reg).lu();
                }
            }
        };
        let norm = x.norm();
        if norm == 0.0 {
            break;
        }
        u = x.iter().map(|v| v / norm).collect();
        let r = residual(&u);
        best = best.min(r);
        if r <= tol {
            return Ok(u);
        }
    }
    Err(Error::Nonsingular { residual: best })
}

/// `B₁ = H B H` with `H` reflecting a null vector of `B` onto `v / ‖v‖₂`, as a
/// row-major dense matrix. Also returns the null vector used.
pub fn householder_b1(b: &SparseSymMatrix, v: &Measure, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = b.n();
    if v.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: v.len(),
        });
    }
    let mut u = null_vector(b, seed)?;
    let vnorm = l2(v.values());
    let vt: Vec<f64> = v.values().iter().map(|x| x / vnorm).collect();
    // ±u are both null vectors; the one facing away from ṽ keeps ‖u − ṽ‖ ≥ √2.
    let dot: f64 = u.iter().zip(&vt).map(|(a, b)| a * b).sum();
    if dot > 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
    let h = Householder::new(&u, &vt)?;

    // M = H B (columns), then B₁ = M H (rows).
    let mut m = b.to_dense();
    let mut col = vec![0.0; n];
    for j in 0..n {
        for i in 0..n {
            col[i] = m[i * n + j];
        }
        h.apply_in_place(&mut col);
        for i in 0..n {
            m[i * n + j] = col[i];
        }
    }
    for i in 0..n {
        h.apply_in_place(&mut m[i * n..(i + 1) * n]);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = avg;
            m[j * n + i] = avg;
        }
    }
    Ok((m, u))
}

/// Kernel `G = 2|||B||| V⁻¹ − H B H` for singular `B`, `V = diag(v / ‖v‖∞)`.
/// `Γ(G) = 2‖v‖∞|||B|||`. Stored dense.
pub fn householder_kernel(b: &SparseSymMatrix, v: &Measure, seed: u64) -> Result<EquilibriumKernel> {
    let n = b.n();
    let (mut g, _) = householder_b1(b, v, seed)?;
    let bnorm = norms(b).row_sum;
    if bnorm == 0.0 {
        return Err(Error::Degenerate("matrix is identically zero".to_string()));
    }
    let vmax = v.max();
    g.iter_mut().for_each(|x| *x = -*x);
    for (x, &vx) in v.values().iter().enumerate() {
        g[x * n + x] += 2.0 * bnorm * vmax / vx;
    }
    let kernel = EquilibriumKernel::assemble(
        Method::Householder,
        KernelBody::Dense { n, data: g },
        0.0,
        2.0 * vmax * bnorm,
        v.clone(),
        None,
    )?;
    if !kernel.nonnegative {
        log::warn!(
            "householder kernel has negative entries (min {:e}); quadrature bounds assume G >= 0",
            kernel.min_entry()
        );
    }
    Ok(kernel)
}
