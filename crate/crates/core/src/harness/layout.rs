use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutStats {
    /// Distinct points used.
    pub points: usize,
    /// `max_x min_s |x − s|` over cloud points `x` and selected `s`.
    pub covering_radius: f64,
    pub min_pairwise_distance: f64,
}

/// First `n` distinct ids of `points`, in order of appearance.
pub fn first_distinct(points: &[usize], n: usize) -> Vec<usize> {
    let mut seen = std::collections::HashSet::new();
    points.iter().copied().filter(|p| seen.insert(*p)).take(n).collect()
}

/// Geometric spread of the first `n` distinct selected points.
pub fn layout_statistics(points: &[usize], cloud: &PointCloud, n: usize) -> Result<LayoutStats> {
    let sel = first_distinct(points, n);
    if sel.len() < 2 {
        return Err(Error::invalid("layout statistics need at least 2 distinct points"));
    }
    if let Some(&bad) = sel.iter().find(|&&s| s >= cloud.len()) {
        return Err(Error::invalid(format!("vertex {bad} has no coordinates")));
    }
    let covering_radius = (0..cloud.len())
        .map(|x| {
            sel.iter()
                .map(|&s| cloud.distance(x, s))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let mut min_pairwise_distance = f64::INFINITY;
    for (i, &a) in sel.iter().enumerate() {
        for &b in &sel[i + 1..] {
            min_pairwise_distance = min_pairwise_distance.min(cloud.distance(a, b));
        }
    }
    Ok(LayoutStats {
        points: sel.len(),
        covering_radius,
        min_pairwise_distance,
    })
}

/// Statistics of `count` uniformly random `size`-subsets of the cloud.
pub fn random_subset_statistics(cloud: &PointCloud, size: usize, count: usize, seed: u64) -> Result<Vec<LayoutStats>> {
    if size > cloud.len() {
        return Err(Error::invalid(format!(
            "subset size {size} exceeds cloud size {}",
            cloud.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let s = sample(&mut rng, cloud.len(), size).into_vec();
            layout_statistics(&s, cloud, size)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_cloud_has_zero_radius() {
        let cloud = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let s = layout_statistics(&[2, 0, 1, 0], &cloud, 3).unwrap();
        assert_eq!(s.covering_radius, 0.0);
        assert_eq!(s.min_pairwise_distance, 1.0);
    }

    #[test]
    fn corners_and_center() {
        let cloud = PointCloud::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
            vec![0.5, 0.5],
        ])
        .unwrap();
        let s = layout_statistics(&[0, 1, 2, 3], &cloud, 4).unwrap();
        assert!((s.covering_radius - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn needs_two_points() {
        let cloud = PointCloud::new(vec![vec![0.0], vec![1.0]]).unwrap();
        assert!(layout_statistics(&[1, 1, 1], &cloud, 5).is_err());
    }

    #[test]
    fn distinct_prefix() {
        assert_eq!(first_distinct(&[3, 1, 3, 2, 1, 4], 3), vec![3, 1, 2]);
    }
}
