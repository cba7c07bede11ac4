use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Measure;

/// Estimates of `∫ f dν*` from the first `n` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub n: usize,
    pub equal_weight: f64,
    /// Undefined for `n < 2`.
    pub summability: Option<f64>,
    pub monte_carlo: Option<f64>,
    pub true_value: f64,
    /// `3|||G||| ‖w‖₁ / (n + 1)`, when a witness was computed.
    pub bound: Option<f64>,
}

fn check_len(points: &[usize], n: usize) -> Result<()> {
    if n > points.len() {
        return Err(Error::invalid(format!(
            "asked for {n} points but the sequence has {}",
            points.len()
        )));
    }
    Ok(())
}

/// `(1/n) Σ_{k<n} f(a_k)`, repeats counted with multiplicity.
pub fn equal_weight_estimate(f: &[f64], points: &[usize], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("equal-weight estimate needs n >= 1"));
    }
    check_len(points, n)?;
    Ok(points[..n].iter().map(|&a| f[a]).sum::<f64>() / n as f64)
}

/// Summability weights `w_j = 2(n−1−j) / (n(n−1))` for `j = 0..n−2`; they
/// sum to one.
pub fn summability_weights(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid("summability weights need n >= 2"));
    }
    let denom = (n * (n - 1)) as f64;
    Ok((0..n - 1).map(|j| 2.0 * (n - 1 - j) as f64 / denom).collect())
}

/// `Σ_j w_j f(a_j)` with the triangular [`summability_weights`].
pub fn summability_estimate(f: &[f64], points: &[usize], n: usize) -> Result<f64> {
    let w = summability_weights(n)?;
    check_len(points, n)?;
    Ok(w.iter().zip(points).map(|(w, &a)| w * f[a]).sum())
}

/// Mean of `f` over `n` i.i.d. draws from `v` (inverse CDF on the cumulative
/// weights).
pub fn monte_carlo_estimate(f: &[f64], v: &Measure, n: usize, seed: u64) -> Result<f64> {
    Ok(monte_carlo_prefix_means(f, v, &[n], seed)?[0])
}

/// Monte Carlo means of one draw sequence at each (ascending) prefix length.
pub fn monte_carlo_prefix_means(f: &[f64], v: &Measure, ns: &[usize], seed: u64) -> Result<Vec<f64>> {
    if f.len() != v.len() {
        return Err(Error::Dimension {
            expected: v.len(),
            got: f.len(),
        });
    }
    if ns.iter().any(|&n| n == 0) {
        return Err(Error::invalid("monte carlo estimate needs n >= 1"));
    }
    let dist = WeightedIndex::new(v.values()).map_err(|e| Error::InvalidMeasure(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max = ns.iter().copied().max().unwrap_or(0);
    let mut out = Vec::with_capacity(ns.len());
    let mut sum = 0.0;
    let mut targets = ns.iter().peekable();
    for k in 1..=max {
        sum += f[dist.sample(&mut rng)];
        while targets.peek() == Some(&&k) {
            out.push(sum / k as f64);
            targets.next();
        }
    }
    if out.len() != ns.len() {
        return Err(Error::invalid("prefix lengths must be ascending"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_weight_examples() {
        let f = [10.0, 20.0];
        let seq = [0, 1, 0, 1];
        assert_eq!(equal_weight_estimate(&f, &seq, 4).unwrap(), 15.0);
        assert_eq!(equal_weight_estimate(&f, &seq, 1).unwrap(), 10.0);
        assert!(equal_weight_estimate(&f, &seq, 0).is_err());
        assert!(equal_weight_estimate(&f, &seq, 5).is_err());
        let c = [2.5; 2];
        for n in 1..=4 {
            assert_eq!(equal_weight_estimate(&c, &seq, n).unwrap(), 2.5);
        }
    }

    #[test]
    fn summability_examples() {
        let f = [1.0, 2.0, 100.0];
        let seq = [0, 1, 2];
        assert!((summability_estimate(&f, &seq, 3).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(summability_estimate(&f, &seq, 2).unwrap(), 1.0);
        assert!(summability_estimate(&f, &seq, 1).is_err());
        for n in 2..50 {
            let s: f64 = summability_weights(n).unwrap().iter().sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
        let c = [0.7; 3];
        let long: Vec<usize> = (0..10).map(|i| i % 3).collect();
        assert!((summability_estimate(&c, &long, 10).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_constant_and_determinism() {
        let v = Measure::normalized(vec![1.0, 2.0, 3.0]).unwrap();
        let c = [4.0; 3];
        assert_eq!(monte_carlo_estimate(&c, &v, 17, 3).unwrap(), 4.0);
        let f = [1.0, -1.0, 0.5];
        assert_eq!(
            monte_carlo_estimate(&f, &v, 50, 9).unwrap(),
            monte_carlo_estimate(&f, &v, 50, 9).unwrap()
        );
        let prefix = monte_carlo_prefix_means(&f, &v, &[10, 50], 9).unwrap();
        assert_eq!(prefix[1], monte_carlo_estimate(&f, &v, 50, 9).unwrap());
    }

    #[test]
    fn monte_carlo_heavy_vertex() {
        let eps = 1e-6;
        let v = Measure::normalized(vec![eps, 1.0, eps]).unwrap();
        let f = [0.0, 1.0, 0.0];
        let hits = (0..10_000u64)
            .filter(|&s| monte_carlo_estimate(&f, &v, 1, s).unwrap() == 1.0)
            .count();
        assert!(hits >= 9_990, "{hits}");
    }

    #[test]
    fn monte_carlo_unbiased() {
        let v = Measure::normalized(vec![0.1, 0.4, 0.2, 0.3]).unwrap();
        let f = [3.0, -1.0, 2.0, 0.5];
        let truth = v.integrate(&f).unwrap();
        let n = 5;
        let trials = 10_000;
        let draws: Vec<f64> = (0..trials as u64)
            .map(|s| monte_carlo_estimate(&f, &v, n, s).unwrap())
            .collect();
        let mean = draws.iter().sum::<f64>() / trials as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        assert!((mean - truth).abs() <= 3.0 * se, "mean {mean} truth {truth} se {se}");
    }
}
