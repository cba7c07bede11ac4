use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Measure;
use crate::kernel::{EquilibriumKernel, SymOperator};

/// `3|||G||| / (n + 1)`.
pub fn discrepancy_bound(row_sum_norm: f64, n: usize) -> f64 {
    3.0 * row_sum_norm / (n as f64 + 1.0)
}

/// `(M(G) − Γ) / n`.
pub fn energy_bound(diag_max: f64, gamma: f64, n: usize) -> f64 {
    (diag_max - gamma) / n as f64
}

/// `2|||G||| / n`, for the summability-weighted potential.
pub fn summability_bound(row_sum_norm: f64, n: usize) -> f64 {
    2.0 * row_sum_norm / n as f64
}

/// `3|||G||| ‖w‖₁ / (n + 1)`.
pub fn quadest_bound(row_sum_norm: f64, w_l1: f64, n: usize) -> f64 {
    3.0 * row_sum_norm * w_l1 / (n as f64 + 1.0)
}

/// [`quadest_bound`] with `|||G|||` taken from the kernel.
pub fn bound_quadest(g: &EquilibriumKernel, w_l1: f64, n: usize) -> f64 {
    quadest_bound(g.norms().row_sum, w_l1, n)
}

/// Interval `[nΓ/(n−1) − M/(n−1), Γ]` containing the averaged step minima.
///
/// The lower end follows from `n² G(σ_n, σ_n) ≥ n² Γ` after removing the
/// `n` diagonal terms, each at most `M`.
pub fn step_minima_range(gamma: f64, diag_max: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    ((nf * gamma - diag_max) / (nf - 1.0), gamma)
}

/// Incremental replay of a point sequence, exposing the empirical measure
/// `σ_n` and its potential at each prefix length.
#[derive(Debug, Clone)]
pub struct BoundReplay<'a> {
    g: &'a EquilibriumKernel,
    points: &'a [usize],
    v: Vec<f64>,
    /// `G(x, ν*)`.
    gv: Vec<f64>,
    gamma: f64,
    /// `p_k = Σ_{j<k} G(·, a_j)`.
    p: Vec<f64>,
    /// `Σ_{k=1}^{k−1} p_k`.
    q: Vec<f64>,
    counts: Vec<f64>,
    step_min_sum: f64,
    k: usize,
    col: Vec<f64>,
}

impl<'a> BoundReplay<'a> {
    pub fn new(g: &'a EquilibriumKernel, v: &Measure, points: &'a [usize]) -> Result<Self> {
        let n = g.n();
        if v.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: v.len(),
            });
        }
        if let Some(&bad) = points.iter().find(|&&a| a >= n) {
            return Err(Error::invalid(format!("vertex {bad} out of range")));
        }
        let gv = g.apply_vec(v.values());
        let gamma = gv.iter().zip(v.values()).map(|(a, b)| a * b).sum();
        Ok(Self {
            g,
            points,
            v: v.values().to_vec(),
            gv,
            gamma,
            p: vec![0.0; n],
            q: vec![0.0; n],
            counts: vec![0.0; n],
            step_min_sum: 0.0,
            k: 0,
            col: vec![0.0; n],
        })
    }

    /// Number of points replayed so far.
    pub fn n(&self) -> usize {
        self.k
    }

    /// `G(ν*, ν*)`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Adds the next point; false when the sequence is exhausted.
    pub fn advance(&mut self) -> bool {
        let Some(&a) = self.points.get(self.k) else {
            return false;
        };
        if self.k >= 1 {
            for (q, p) in self.q.iter_mut().zip(&self.p) {
                *q += p;
            }
            self.step_min_sum += self.p[a];
        }
        self.g.column_into(a, &mut self.col);
        for (p, c) in self.p.iter_mut().zip(&self.col) {
            *p += c;
        }
        self.counts[a] += 1.0;
        self.k += 1;
        true
    }

    /// Replays until `n` points have been added.
    pub fn advance_to(&mut self, n: usize) -> Result<()> {
        if n < self.k {
            return Err(Error::invalid("replay cannot move backwards"));
        }
        while self.k < n {
            if !self.advance() {
                return Err(Error::invalid(format!(
                    "sequence has {} points, need {n}",
                    self.points.len()
                )));
            }
        }
        Ok(())
    }

    /// `max_x |G(x, ν*) − G(x, σ_n)|`.
    pub fn potential_discrepancy(&self) -> f64 {
        let n = self.k as f64;
        self.gv
            .iter()
            .zip(&self.p)
            .map(|(g, p)| (g - p / n).abs())
            .fold(0.0, f64::max)
    }

    /// `G(σ_n − ν*, σ_n − ν*)`.
    pub fn energy_distance(&self) -> f64 {
        let n = self.k as f64;
        (0..self.p.len())
            .map(|x| (self.counts[x] / n - self.v[x]) * (self.p[x] / n - self.gv[x]))
            .sum()
    }

    /// `max_x |Σ_j w_j G(x, a_j) − G(x, ν*)|` with the summability weights;
    /// `None` for `n < 2`.
    pub fn summability_discrepancy(&self) -> Option<f64> {
        if self.k < 2 {
            return None;
        }
        let n = self.k as f64;
        let scale = 2.0 / (n * (n - 1.0));
        Some(
            self.q
                .iter()
                .zip(&self.gv)
                .map(|(q, g)| (scale * q - g).abs())
                .fold(0.0, f64::max),
        )
    }

    /// `(2/(n(n−1))) Σ_{k=1}^{n−1} k G(ν_k, σ_k)`, the averaged step minima;
    /// `None` for `n < 2`.
    pub fn averaged_step_minima(&self) -> Option<f64> {
        if self.k < 2 {
            return None;
        }
        let n = self.k as f64;
        Some(2.0 * self.step_min_sum / (n * (n - 1.0)))
    }
}

/// `max_x |G(x, ν*) − G(x, σ_n)|` for the first `n` points.
pub fn potential_discrepancy(g: &EquilibriumKernel, v: &Measure, points: &[usize], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("discrepancy needs n >= 1"));
    }
    let mut r = BoundReplay::new(g, v, points)?;
    r.advance_to(n)?;
    Ok(r.potential_discrepancy())
}

/// `G(σ_n − ν*, σ_n − ν*)` for the first `n` points.
pub fn energy_distance(g: &EquilibriumKernel, v: &Measure, points: &[usize], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("energy distance needs n >= 1"));
    }
    let mut r = BoundReplay::new(g, v, points)?;
    r.advance_to(n)?;
    Ok(r.energy_distance())
}

/// Measured value against its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub measured: f64,
    pub bound: f64,
    pub passed: bool,
}

impl BoundCheck {
    /// Passes when `measured ≤ bound + 1e−9·scale`.
    pub fn upper(measured: f64, bound: f64, scale: f64) -> Self {
        Self {
            measured,
            bound,
            passed: measured <= bound + 1e-9 * scale,
        }
    }

    /// Passes when `measured ≥ bound − 1e−9·scale`.
    pub fn lower(measured: f64, bound: f64, scale: f64) -> Self {
        Self {
            measured,
            bound,
            passed: measured >= bound - 1e-9 * scale,
        }
    }
}
