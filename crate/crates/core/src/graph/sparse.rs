use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Symmetric sparse matrix indexed by vertices, stored as full CSR.
///
/// Both triangles are stored, so row `x` doubles as column `x`. Explicit zeros
/// are dropped on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds from `(i, j, w)` entries. Each entry sets both `(i, j)` and
    /// `(j, i)`; repeated pairs are summed.
    pub fn from_entries<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (i, j, w) in entries {
            if i >= n || j >= n {
                return Err(Error::invalid(format!(
                    "entry ({i}, {j}) out of range for n = {n}"
                )));
            }
            if !w.is_finite() {
                return Err(Error::invalid(format!("non-finite weight at ({i}, {j})")));
            }
            *rows[i].entry(j).or_insert(0.0) += w;
            if i != j {
                *rows[j].entry(i).or_insert(0.0) += w;
            }
        }
        Ok(Self::from_rows(n, rows))
    }

    /// Builds from a row-major dense array, which must be exactly symmetric.
    pub fn from_dense(n: usize, dense: &[f64]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        if dense.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: dense.len(),
            });
        }
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for i in 0..n {
            for j in 0..n {
                let w = dense[i * n + j];
                if w != dense[j * n + i] {
                    return Err(Error::invalid(format!("matrix not symmetric at ({i}, {j})")));
                }
                if w != 0.0 {
                    rows[i].insert(j, w);
                }
            }
        }
        Ok(Self::from_rows(n, rows))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_entries(n, (0..n).map(|i| (i, i, 1.0)))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_entries(n, std::iter::empty())
    }

    fn from_rows(n: usize, rows: Vec<BTreeMap<usize, f64>>) -> Self {
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (j, w) in row {
                if w != 0.0 {
                    cols.push(j);
                    vals.push(w);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored entries, counting both triangles.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Stored entries of row (equivalently column) `x` as `(index, value)`.
    pub fn row(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[x]..self.row_ptr[x + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        let span = self.row_ptr[x]..self.row_ptr[x + 1];
        match self.cols[span.clone()].binary_search(&y) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diag(&self, x: usize) -> f64 {
        self.get(x, x)
    }

    /// All stored `(i, j, w)` with `i <= j`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.row(i)
                .filter(move |&(j, _)| j >= i)
                .map(move |(j, w)| (i, j, w))
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut out = vec![0.0; self.n];
        self.matvec_into(x, &mut out);
        Ok(out)
    }

    /// `out = A x`; lengths must equal `n`.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, w) in self.row(i) {
                acc += w * x[j];
            }
            *o = acc;
        }
    }

    /// `Σ_{x,y} A(x,y) μ(x) ν(y)`.
    pub fn quadratic_form(&self, mu: &[f64], nu: &[f64]) -> Result<f64> {
        let a_nu = self.matvec(nu)?;
        if mu.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: mu.len(),
            });
        }
        Ok(mu.iter().zip(&a_nu).map(|(m, a)| m * a).sum())
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, w)| w).sum()).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.vals.iter().all(|&w| w >= 0.0)
    }

    /// Entry-wise map over stored values; resulting zeros are dropped.
    pub fn map_entries<F>(&self, mut f: F) -> Self
    where
        F: FnMut(usize, usize, f64) -> f64,
    {
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); self.n];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, w) in self.row(i) {
                row.insert(j, f(i, j, w));
            }
        }
        Self::from_rows(self.n, rows)
    }

    /// Adds `d[x]` to each diagonal entry.
    pub fn add_diagonal(&self, d: &[f64]) -> Result<Self> {
        if d.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: d.len(),
            });
        }
        let entries = self
            .upper_entries()
            .chain(d.iter().enumerate().map(|(i, &w)| (i, i, w)));
        Self::from_entries(self.n, entries)
    }

    /// Combinatorial Laplacian `diag(A𝟙) − A`.
    pub fn laplacian(&self) -> Self {
        let deg = self.row_sums();
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); self.n];
        for (i, row) in rows.iter_mut().enumerate() {
            row.insert(i, deg[i]);
            for (j, w) in self.row(i) {
                *row.entry(j).or_insert(0.0) -= w;
            }
        }
        Self::from_rows(self.n, rows)
    }

    /// Exact sparse product `A·A`.
    pub fn square(&self) -> Self {
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); self.n];
        for (i, row) in rows.iter_mut().enumerate() {
            for (k, a_ik) in self.row(i) {
                for (j, a_kj) in self.row(k) {
                    *row.entry(j).or_insert(0.0) += a_ik * a_kj;
                }
            }
        }
        // Summation order differs between (i, j) and (j, i); mirror the upper
        // triangle so the result is exactly symmetric.
        for i in 0..self.n {
            let lower: Vec<(usize, f64)> = rows[i].range(..i).map(|(&j, &w)| (j, w)).collect();
            for (j, _) in lower {
                let w = rows[j].get(&i).copied().unwrap_or(0.0);
                rows[i].insert(j, w);
            }
        }
        Self::from_rows(self.n, rows)
    }

    /// Connected components (by stored off-diagonal entries), each sorted, in
    /// order of their smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.n];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![s];
            label[s] = id;
            let mut head = 0;
            while head < members.len() {
                let x = members[head];
                head += 1;
                for (y, _) in self.row(x) {
                    if label[y] == usize::MAX {
                        label[y] = id;
                        members.push(y);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Largest connected component and the map from new to original index.
    /// Equal sizes resolve to the component holding the smallest vertex.
    pub fn largest_connected_component(&self) -> (Self, Vec<usize>) {
        let comps = self.components();
        let mut best = 0;
        for (i, c) in comps.iter().enumerate() {
            if c.len() > comps[best].len() {
                best = i;
            }
        }
        let keep = comps[best].clone();
        (self.submatrix(&keep), keep)
    }

    /// Principal submatrix on `keep` (original indices, ascending).
    pub fn submatrix(&self, keep: &[usize]) -> Self {
        let mut new_index = vec![usize::MAX; self.n];
        for (k, &x) in keep.iter().enumerate() {
            new_index[x] = k;
        }
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); keep.len()];
        for (k, &x) in keep.iter().enumerate() {
            for (y, w) in self.row(x) {
                if new_index[y] != usize::MAX {
                    rows[k].insert(new_index[y], w);
                }
            }
        }
        Self::from_rows(keep.len(), rows)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for (j, w) in self.row(i) {
                out[i * self.n + j] = w;
            }
        }
        out
    }
}
