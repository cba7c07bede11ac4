use super::config::TestFunction;
use crate::error::{Error, Result};
use crate::graph::{PointCloud, SparseSymMatrix};

const FIEDLER_MAX_ITER: usize = 50_000;
const FIEDLER_TOL: f64 = 1e-10;

/// Evaluates `policy` on the vertices of `graph`.
pub fn smooth_test_function(
    graph: &SparseSymMatrix,
    cloud: Option<&PointCloud>,
    labels: Option<&[i64]>,
    policy: TestFunction,
) -> Result<Vec<f64>> {
    let n = graph.n();
    match policy {
        TestFunction::Coordinate(axis) => {
            let cloud = cloud.ok_or_else(|| Error::invalid("coordinate function needs a point cloud"))?;
            if cloud.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: cloud.len(),
                });
            }
            cloud.coordinate(axis)
        }
        TestFunction::Indicator(class) => {
            let labels = labels.ok_or_else(|| Error::invalid("indicator function needs labels"))?;
            if labels.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: labels.len(),
                });
            }
            Ok(labels.iter().map(|&l| if l == class { 1.0 } else { 0.0 }).collect())
        }
        TestFunction::Constant(c) => Ok(vec![c; n]),
        TestFunction::Fiedler => fiedler_vector(graph),
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

fn deflate(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

/// Unit eigenvector of the graph Laplacian for its second-smallest
/// eigenvalue, by power iteration on `cI − L` restricted to `𝟙^⊥`. The sign
/// makes the first clearly nonzero entry positive.
pub fn fiedler_vector(graph: &SparseSymMatrix) -> Result<Vec<f64>> {
    let n = graph.n();
    if n < 2 {
        return Err(Error::invalid("fiedler vector needs at least 2 vertices"));
    }
    let lap = graph.laplacian();
    // Gershgorin bound on the largest Laplacian eigenvalue.
    let shift = (0..n)
        .map(|x| lap.row(x).map(|(_, w)| w.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut x: Vec<f64> = (0..n).map(|i| i as f64 - (n - 1) as f64 / 2.0).collect();
    normalize(&mut x);
    let mut lx = vec![0.0; n];
    let mut converged = false;
    for _ in 0..FIEDLER_MAX_ITER {
        lap.matvec_into(&x, &mut lx);
        let rayleigh: f64 = x.iter().zip(&lx).map(|(a, b)| a * b).sum();
        let resid = x
            .iter()
            .zip(&lx)
            .map(|(a, b)| (b - rayleigh * a).powi(2))
            .sum::<f64>()
            .sqrt();
        if resid <= FIEDLER_TOL * shift {
            converged = true;
            break;
        }
        for (xi, li) in x.iter_mut().zip(&lx) {
            *xi = shift * *xi - li;
        }
        deflate(&mut x);
        normalize(&mut x);
    }
    if !converged {
        log::warn!("fiedler power iteration stopped at the {FIEDLER_MAX_ITER}-step budget");
    }
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-8 * scale) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
    Ok(x)
}
