#![allow(dead_code)]

use std::collections::BTreeMap;

use graphleja::graph::{Measure, SparseSymMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Connected graph: random spanning tree plus `extra` random edges, weights
/// in `[0.1, 1)`.
pub fn random_connected(n: usize, extra: usize, seed: u64) -> SparseSymMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = BTreeMap::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.insert((j, i), rng.random_range(0.1..1.0));
    }
    for _ in 0..extra {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i != j {
            edges.insert((i.min(j), i.max(j)), rng.random_range(0.1..1.0));
        }
    }
    SparseSymMatrix::from_entries(n, edges.into_iter().map(|((i, j), w)| (i, j, w))).unwrap()
}

pub fn random_measure(n: usize, seed: u64) -> Measure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    Measure::normalized((0..n).map(|_| rng.random_range(0.05..1.0)).collect()).unwrap()
}

pub fn random_function(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf00d);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Arbitrary symmetric sparse matrix as `(n, entries)` with possibly
/// negative weights and diagonal entries.
pub fn sym_entries(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (1..=max_n).prop_flat_map(|n| {
        let entry = (0..n, 0..n, -2.0f64..2.0);
        (Just(n), prop::collection::vec(entry, 0..3 * n))
    })
}

pub fn dense_from_entries(n: usize, entries: &[(usize, usize, f64)]) -> Vec<f64> {
    let mut d = vec![0.0; n * n];
    for &(i, j, w) in entries {
        d[i * n + j] += w;
        if i != j {
            d[j * n + i] += w;
        }
    }
    d
}

pub fn dense_matvec(n: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
    (0..n).map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum()).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
