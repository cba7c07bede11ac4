//! Representers `w` with `G w = f`, for the quadrature error bound.

use crate::error::{Error, Result};
use crate::kernel::SymOperator;

pub const DEFAULT_WITNESS_TOL: f64 = 1e-10;

/// A solution of `G w = f` and its size.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub w: Vec<f64>,
    pub l1: f64,
    /// `‖G w − f‖∞ / ‖f‖∞`.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// MINRES on `A x = b` from `x = 0`. Returns `x` after the recurrence
/// residual drops below `tol2` or the Krylov space is exhausted.
pub fn minres<A: SymOperator + ?Sized>(a: &A, b: &[f64], tol2: f64, max_iter: usize) -> Vec<f64> {
    let n = a.dim();
    let mut x = vec![0.0; n];
    let beta1 = dot(b, b).sqrt();
    if beta1 == 0.0 {
        return x;
    }
    let mut r1 = b.to_vec();
    let mut r2 = b.to_vec();
    let mut y = b.to_vec();
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let (mut oldb, mut beta) = (0.0, beta1);
    let (mut dbar, mut epsln, mut phibar) = (0.0, 0.0, beta1);
    let (mut cs, mut sn) = (-1.0f64, 0.0f64);

    for itn in 1..=max_iter {
        let s = 1.0 / beta;
        for (vi, yi) in v.iter_mut().zip(&y) {
            *vi = s * yi;
        }
        a.apply(&v, &mut y);
        if itn >= 2 {
            let f = beta / oldb;
            for (yi, ri) in y.iter_mut().zip(&r1) {
                *yi -= f * ri;
            }
        }
        let alfa = dot(&v, &y);
        let f = alfa / beta;
        for (yi, ri) in y.iter_mut().zip(&r2) {
            *yi -= f * ri;
        }
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        oldb = beta;
        beta = dot(&r2, &r2).sqrt();

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;

        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        std::mem::swap(&mut w1, &mut w2);
        std::mem::swap(&mut w2, &mut w);
        for i in 0..n {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
            x[i] += phi * w[i];
        }
        if phibar <= tol2 || beta <= f64::EPSILON * beta1 {
            break;
        }
    }
    x
}

/// Finds some `w` with `‖G w − f‖∞ ≤ tol ‖f‖∞` by MINRES with iterative
/// refinement, and reports `‖w‖₁`.
///
/// `w` is any representer, not the ℓ1-minimal one, so bounds built from it
/// are valid but not tight.
pub fn witness_l1<A: SymOperator + ?Sized>(g: &A, f: &[f64], tol: f64) -> Result<Witness> {
    let n = g.dim();
    if f.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: f.len(),
        });
    }
    let fnorm = norm_inf(f);
    if fnorm == 0.0 {
        return Ok(Witness {
            w: vec![0.0; n],
            l1: 0.0,
            residual: 0.0,
        });
    }
    let max_iter = 10 * n + 100;
    let mut w = vec![0.0; n];
    let mut r = f.to_vec();
    let mut rel = 1.0;
    for _ in 0..8 {
        let rnorm = norm_inf(&r);
        let dx = minres(g, &r, 0.1 * tol * fnorm, max_iter);
        for (wi, di) in w.iter_mut().zip(&dx) {
            *wi += di;
        }
        let gw = g.apply_vec(&w);
        for i in 0..n {
            r[i] = f[i] - gw[i];
        }
        let new_rel = norm_inf(&r) / fnorm;
        if new_rel <= tol {
            return Ok(Witness {
                l1: w.iter().map(|x| x.abs()).sum(),
                w,
                residual: new_rel,
            });
        }
        // Stagnation means the residual has a component outside the range.
        if norm_inf(&r) > 0.5 * rnorm {
            rel = new_rel;
            break;
        }
        rel = new_rel;
    }
    Err(Error::OutsideRange { residual: rel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SparseSymMatrix;

    #[test]
    fn two_by_two() {
        let g = SparseSymMatrix::from_dense(2, &[3.0, 1.0, 1.0, 3.0]).unwrap();
        let wit = witness_l1(&g, &[2.0, 2.0], 1e-10).unwrap();
        assert!((wit.w[0] - 0.5).abs() < 1e-12 && (wit.w[1] - 0.5).abs() < 1e-12);
        assert!((wit.l1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constructed_preimage() {
        let g = SparseSymMatrix::from_entries(
            4,
            [(0, 0, 4.0), (1, 1, 5.0), (2, 2, 3.0), (3, 3, 6.0), (0, 1, 1.0), (1, 2, 0.5), (2, 3, 2.0)],
        )
        .unwrap();
        let f = g.matvec(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let wit = witness_l1(&g, &f, 1e-10).unwrap();
        assert!((wit.l1 - 1.0).abs() < 1e-9);
        assert!(wit.residual <= 1e-10);
    }

    #[test]
    fn singular_outside_range() {
        // Laplacian of a single edge; range is spanned by (1, −1).
        let l = SparseSymMatrix::from_dense(2, &[1.0, -1.0, -1.0, 1.0]).unwrap();
        assert!(matches!(
            witness_l1(&l, &[1.0, 1.0], 1e-10),
            Err(Error::OutsideRange { .. })
        ));
        let ok = witness_l1(&l, &[1.0, -1.0], 1e-10).unwrap();
        assert!(ok.residual <= 1e-10);
    }

    #[test]
    fn zero_rhs() {
        let g = SparseSymMatrix::identity(3).unwrap();
        assert_eq!(witness_l1(&g, &[0.0; 3], 1e-10).unwrap().l1, 0.0);
    }
}
