//! Random graph and point-cloud generators.
//!
//! All generators take an explicit seed and are deterministic for a given seed.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::sparse::SparseSymMatrix;
use crate::error::{Error, Result};

/// Points in `R^d`, one coordinate tuple per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty);
        }
        let d = points[0].len();
        if d == 0 {
            return Err(Error::invalid("points must have at least one coordinate"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != d {
                return Err(Error::Dimension {
                    expected: d,
                    got: p.len(),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid(format!("point {i} has a non-finite coordinate")));
            }
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Values of one coordinate across all points.
    pub fn coordinate(&self, axis: usize) -> Result<Vec<f64>> {
        if axis >= self.dim() {
            return Err(Error::invalid(format!(
                "axis {axis} out of range for dimension {}",
                self.dim()
            )));
        }
        Ok(self.points.iter().map(|p| p[axis]).collect())
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(&self.points[i], &self.points[j])
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Edge weight as a function of Euclidean distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeWeight {
    /// `exp(-d² / σ²)`
    Gaussian { sigma: f64 },
    /// `log(1 / (d + ε))`, clamped at zero
    LogPotential { eps: f64 },
}

impl EdgeWeight {
    pub fn weight(&self, dist: f64) -> f64 {
        match *self {
            EdgeWeight::Gaussian { sigma } => (-(dist * dist) / (sigma * sigma)).exp(),
            EdgeWeight::LogPotential { eps } => (1.0 / (dist + eps)).ln().max(0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            EdgeWeight::Gaussian { sigma } if !(sigma > 0.0) => {
                Err(Error::invalid("gaussian bandwidth must be positive"))
            }
            EdgeWeight::LogPotential { eps } if !(eps > 0.0) => {
                Err(Error::invalid("log-potential offset must be positive"))
            }
            _ => Ok(()),
        }
    }
}

/// Exact symmetrized k-nearest-neighbor graph: `(i, j)` is an edge when either
/// endpoint is among the other's `k` nearest. Ties in distance go to the lower
/// index. With `self_loops`, each vertex also gets the distance-zero weight on
/// its diagonal.
pub fn knn_graph(
    cloud: &PointCloud,
    k: usize,
    weight: EdgeWeight,
    self_loops: bool,
) -> Result<SparseSymMatrix> {
    let n = cloud.len();
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    if k >= n {
        return Err(Error::invalid(format!("k = {k} must be below the cloud size {n}")));
    }
    weight.validate()?;

    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut cand: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        cand.clear();
        cand.extend((0..n).filter(|&j| j != i).map(|j| (cloud.distance(i, j), j)));
        let by_dist = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        cand.select_nth_unstable_by(k - 1, by_dist);
        for &(_, j) in &cand[..k] {
            edges.insert((i.min(j), i.max(j)));
        }
    }

    let mut entries: Vec<(usize, usize, f64)> = edges
        .into_iter()
        .map(|(i, j)| (i, j, weight.weight(cloud.distance(i, j))))
        .collect();
    if self_loops {
        let w0 = weight.weight(0.0);
        entries.extend((0..n).map(|i| (i, i, w0)));
    }
    SparseSymMatrix::from_entries(n, entries)
}

/// Watts–Strogatz small-world graph with unit weights.
///
/// Starts from a ring lattice joining each vertex to `mean_degree / 2`
/// neighbors on each side; each lattice edge `(u, u + j)` is then, with
/// probability `beta`, detached from `u + j` and reattached to a uniformly
/// chosen vertex that is neither `u` nor already adjacent to `u`.
pub fn watts_strogatz(n: usize, mean_degree: usize, beta: f64, seed: u64) -> Result<SparseSymMatrix> {
    if mean_degree == 0 || mean_degree % 2 != 0 || mean_degree >= n {
        return Err(Error::invalid(format!(
            "mean degree {mean_degree} must be even, positive and below n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::invalid(format!("beta = {beta} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let half = mean_degree / 2;
    for u in 0..n {
        for j in 1..=half {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for j in 1..=half {
        for u in 0..n {
            let v = (u + j) % n;
            if !adj[u].contains(&v) || rng.random::<f64>() >= beta {
                continue;
            }
            if adj[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    let entries = adj
        .iter()
        .enumerate()
        .flat_map(|(u, nb)| nb.iter().filter(move |&&v| v > u).map(move |&v| (u, v, 1.0)));
    SparseSymMatrix::from_entries(n, entries)
}

/// Two isotropic Gaussian clusters: `round(heavy_fraction · n)` points around
/// `centers[0]`, the rest around `centers[1]`.
pub fn two_cluster_cloud(
    n: usize,
    heavy_fraction: f64,
    centers: [[f64; 2]; 2],
    spread: f64,
    seed: u64,
) -> Result<PointCloud> {
    if n < 2 {
        return Err(Error::invalid("two-cluster cloud needs at least 2 points"));
    }
    if !(heavy_fraction > 0.0 && heavy_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "heavy fraction {heavy_fraction} outside (0, 1)"
        )));
    }
    if !(spread > 0.0) {
        return Err(Error::invalid("spread must be positive"));
    }
    let heavy = (heavy_fraction * n as f64).round() as usize;
    let normal = Normal::new(0.0, spread).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|i| {
            let c = if i < heavy { centers[0] } else { centers[1] };
            vec![c[0] + normal.sample(&mut rng), c[1] + normal.sample(&mut rng)]
        })
        .collect();
    PointCloud::new(points)
}

/// `n` i.i.d. uniform points on the unit square.
pub fn uniform_square_cloud(n: usize, seed: u64) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
        .collect();
    PointCloud::new(points)
}
