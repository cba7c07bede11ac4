use serde::{Deserialize, Serialize};

use super::operator::SymOperator;
use crate::error::{Error, Result};
use crate::graph::{Measure, NormReport, SparseSymMatrix};

/// Which construction produced a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// `2|||B₁||| V⁻¹ − B₁` with `B₁` the v-Laplacian.
    DiagStrict,
    /// `2|||B||| V⁻¹ − B₁`, keeps the off-diagonal pattern of `B`.
    DiagGraph,
    /// `2|||B||| V⁻¹ − H B H` for a singular `B`.
    Householder,
    /// `V⁻¹ D B̃ D V⁻¹` with `D` from symmetric Sinkhorn scaling.
    Sinkhorn,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::DiagStrict => "diag_strict",
            Method::DiagGraph => "diag_graph",
            Method::Householder => "householder",
            Method::Sinkhorn => "sinkhorn",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diag_strict" => Ok(Method::DiagStrict),
            "diag_graph" => Ok(Method::DiagGraph),
            "householder" => Ok(Method::Householder),
            "sinkhorn" => Ok(Method::Sinkhorn),
            _ => Err(Error::invalid(format!("unknown kernel method {s:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Storage of the kernel entries.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelBody {
    /// Row-major dense matrix, for small instances only.
    Dense { n: usize, data: Vec<f64> },
    /// Sparse part plus an optional symmetric rank-one term `coef · c cᵀ`.
    Structured {
        sparse: SparseSymMatrix,
        rank_one: Option<RankOne>,
    },
}

/// The term `coef · c cᵀ`; never materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOne {
    pub coef: f64,
    pub c: Vec<f64>,
    abs_sum: f64,
}

impl RankOne {
    pub fn new(coef: f64, c: Vec<f64>) -> Self {
        let abs_sum = c.iter().map(|x| x.abs()).sum();
        Self { coef, c, abs_sum }
    }

    #[inline]
    fn entry(&self, x: usize, y: usize) -> f64 {
        // c[x]*c[y] first so the entry is exactly symmetric.
        self.coef * (self.c[x] * self.c[y])
    }
}

/// A kernel whose equilibrium measure is `measure`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumKernel {
    pub method: Method,
    pub body: KernelBody,
    /// Weight of the uniform augmentation, 0 when none was applied.
    pub alpha: f64,
    /// `Γ(G)`: closed form where known, otherwise `G(v, v)`.
    pub capacity: f64,
    /// `max_x |G(x, v) − capacity|` measured at construction.
    pub capacity_deviation: f64,
    pub measure: Measure,
    /// Diagonal of the symmetric scaling, for Sinkhorn kernels.
    pub scaling: Option<Vec<f64>>,
    /// Whether every entry is `>= 0`.
    pub nonnegative: bool,
}

impl EquilibriumKernel {
    /// Assembles a kernel and measures its equilibrium deviation against
    /// `capacity`.
    pub fn assemble(
        method: Method,
        body: KernelBody,
        alpha: f64,
        capacity: f64,
        measure: Measure,
        scaling: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = match &body {
            KernelBody::Dense { n, data } => {
                if data.len() != n * n {
                    return Err(Error::Dimension {
                        expected: n * n,
                        got: data.len(),
                    });
                }
                *n
            }
            KernelBody::Structured { sparse, rank_one } => {
                if let Some(r) = rank_one {
                    if r.c.len() != sparse.n() {
                        return Err(Error::Dimension {
                            expected: sparse.n(),
                            got: r.c.len(),
                        });
                    }
                }
                sparse.n()
            }
        };
        if measure.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: measure.len(),
            });
        }
        let mut k = Self {
            method,
            body,
            alpha,
            capacity,
            capacity_deviation: 0.0,
            measure,
            scaling,
            nonnegative: true,
        };
        k.nonnegative = k.min_entry() >= 0.0;
        let gv = k.apply_vec(k.measure.values());
        k.capacity_deviation = gv
            .iter()
            .map(|g| (g - capacity).abs())
            .fold(0.0, f64::max);
        Ok(k)
    }

    pub fn n(&self) -> usize {
        match &self.body {
            KernelBody::Dense { n, .. } => *n,
            KernelBody::Structured { sparse, .. } => sparse.n(),
        }
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        match &self.body {
            KernelBody::Dense { n, data } => data[x * n + y],
            KernelBody::Structured { sparse, rank_one } => {
                let s = sparse.get(x, y);
                match rank_one {
                    Some(r) => s + r.entry(x, y),
                    None => s,
                }
            }
        }
    }

    /// Writes column `x` into `out` in `O(nnz(column) + N)`.
    pub fn column_into(&self, x: usize, out: &mut [f64]) {
        match &self.body {
            KernelBody::Dense { n, data } => out.copy_from_slice(&data[x * n..(x + 1) * n]),
            KernelBody::Structured { sparse, rank_one } => {
                match rank_one {
                    Some(r) => {
                        for (y, o) in out.iter_mut().enumerate() {
                            *o = r.entry(y, x);
                        }
                    }
                    None => out.fill(0.0),
                }
                for (y, w) in sparse.row(x) {
                    out[y] += w;
                }
            }
        }
    }

    pub fn column(&self, x: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        self.column_into(x, &mut out);
        out
    }

    /// `Σ_y |G(x,y)|`, with the rank-one term handled in closed form.
    pub fn row_abs_sum(&self, x: usize) -> f64 {
        match &self.body {
            KernelBody::Dense { n, data } => data[x * n..(x + 1) * n].iter().map(|v| v.abs()).sum(),
            KernelBody::Structured { sparse, rank_one } => match rank_one {
                None => sparse.row(x).map(|(_, w)| w.abs()).sum(),
                Some(r) => {
                    let mut total = r.coef.abs() * r.c[x].abs() * r.abs_sum;
                    for (y, w) in sparse.row(x) {
                        let ry = r.entry(x, y);
                        total += (w + ry).abs() - ry.abs();
                    }
                    total
                }
            },
        }
    }

    pub fn norms(&self) -> NormReport {
        let mut report = NormReport {
            diag_max: 0.0,
            row_sum: 0.0,
            offdiag_row_sum: 0.0,
        };
        for x in 0..self.n() {
            let d = self.entry(x, x).abs();
            let r = self.row_abs_sum(x);
            report.diag_max = report.diag_max.max(d);
            report.row_sum = report.row_sum.max(r);
            report.offdiag_row_sum = report.offdiag_row_sum.max(r - d);
        }
        report
    }

    pub fn min_entry(&self) -> f64 {
        match &self.body {
            KernelBody::Dense { data, .. } => data.iter().copied().fold(f64::INFINITY, f64::min),
            KernelBody::Structured { sparse, rank_one } => {
                let n = sparse.n();
                let mut min = f64::INFINITY;
                let mut col = vec![0.0; n];
                // Unstored entries equal the rank-one term (or zero).
                if rank_one.is_none() && sparse.nnz() < n * n {
                    min = 0.0;
                }
                for x in 0..n {
                    if rank_one.is_some() {
                        self.column_into(x, &mut col);
                        min = col.iter().copied().fold(min, f64::min);
                    } else {
                        min = sparse.row(x).map(|(_, w)| w).fold(min, f64::min);
                    }
                }
                min
            }
        }
    }

    /// Row-major dense copy, built from [`entry`](Self::entry).
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n * n];
        for x in 0..n {
            for y in 0..n {
                out[x * n + y] = self.entry(x, y);
            }
        }
        out
    }
}

impl SymOperator for EquilibriumKernel {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        match &self.body {
            KernelBody::Dense { n, data } => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = data[i * n..(i + 1) * n]
                        .iter()
                        .zip(x)
                        .map(|(a, b)| a * b)
                        .sum();
                }
            }
            KernelBody::Structured { sparse, rank_one } => {
                sparse.matvec_into(x, out);
                if let Some(r) = rank_one {
                    let dot: f64 = r.c.iter().zip(x).map(|(a, b)| a * b).sum();
                    let s = r.coef * dot;
                    for (o, c) in out.iter_mut().zip(&r.c) {
                        *o += s * c;
                    }
                }
            }
        }
    }
}

/// Outcome of the constant-potential check `G(x, v) = G(v, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub gamma_est: f64,
    pub max_dev: f64,
    pub passed: bool,
}

/// Checks that the potential of `v` is constant: `gamma_est = G(v, v)` and
/// `max_dev = max_x |G(x, v) − gamma_est|`.
pub fn verify_equilibrium<K: SymOperator + ?Sized>(g: &K, v: &Measure, tol: f64) -> Result<EquilibriumReport> {
    if g.dim() != v.len() {
        return Err(Error::Dimension {
            expected: g.dim(),
            got: v.len(),
        });
    }
    let gv = g.apply_vec(v.values());
    let gamma_est: f64 = gv.iter().zip(v.values()).map(|(a, b)| a * b).sum();
    let max_dev = gv
        .iter()
        .map(|x| (x - gamma_est).abs())
        .fold(0.0, f64::max);
    Ok(EquilibriumReport {
        gamma_est,
        max_dev,
        passed: max_dev <= tol,
    })
}
