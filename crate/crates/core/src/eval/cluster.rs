//! Density-based clustering of embedded points.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::data::Embedding;
use crate::error::{Error, Result};

/// Label assigned to points that belong to no cluster.
pub const NOISE: i64 = -1;

/// DBSCAN over Euclidean distances in the embedding.
///
/// A point is a core point when at least `min_pts` points, itself included,
/// lie within `eps` (inclusive). Clusters are numbered from 0 in order of
/// their lowest-index core point; non-core points reachable from no core
/// point are [`NOISE`].
pub fn cluster_dbscan(emb: &Embedding, eps: f64, min_pts: usize) -> Result<Vec<i64>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::usage(format!("eps must be positive, got {eps}")));
    }
    if min_pts == 0 {
        return Err(Error::usage("min_pts must be >= 1"));
    }
    let n = emb.n_points();
    let eps_sq = eps * eps;
    let neighbourhoods: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).filter(|&j| emb.dist_sq(i, j) <= eps_sq).collect())
        .collect();
    let is_core: Vec<bool> = neighbourhoods.iter().map(|nb| nb.len() >= min_pts).collect();

    let mut labels = vec![NOISE; n];
    let mut assigned = vec![false; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for seed in 0..n {
        if assigned[seed] || !is_core[seed] {
            continue;
        }
        assigned[seed] = true;
        labels[seed] = next;
        queue.push_back(seed);
        while let Some(p) = queue.pop_front() {
            if !is_core[p] {
                continue;
            }
            for &q in &neighbourhoods[p] {
                if !assigned[q] {
                    assigned[q] = true;
                    labels[q] = next;
                    queue.push_back(q);
                }
            }
        }
        next += 1;
    }
    Ok(labels)
}

/// Number of distinct non-noise labels.
pub fn n_clusters(labels: &[i64]) -> usize {
    let mut seen: Vec<i64> = labels.iter().copied().filter(|&l| l != NOISE).collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::CurveParams;
    use rand::{Rng, SeedableRng};

    fn emb(coords: Vec<f64>) -> Embedding {
        Embedding::new(coords, 2, CurveParams { a: 1.0, b: 1.0 }, 0.1).unwrap()
    }

    fn blobs(rng: &mut impl Rng) -> Vec<f64> {
        let mut c = Vec::new();
        for centre in [(0.0, 0.0), (20.0, 5.0)] {
            for _ in 0..40 {
                c.push(centre.0 + rng.random_range(-1.0..1.0));
                c.push(centre.1 + rng.random_range(-1.0..1.0));
            }
        }
        c
    }

    #[test]
    fn two_blobs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let labels = cluster_dbscan(&emb(blobs(&mut rng)), 1.5, 4).unwrap();
        assert_eq!(n_clusters(&labels), 2);
        assert!(labels.iter().all(|&l| l != NOISE));
        assert!(labels[..40].iter().all(|&l| l == 0));
        assert!(labels[40..].iter().all(|&l| l == 1));
    }

    #[test]
    fn tiny_eps_is_all_noise() {
        let e = emb(vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        assert_eq!(cluster_dbscan(&e, 0.5, 2).unwrap(), vec![NOISE; 3]);
    }

    #[test]
    fn single_point_cluster() {
        let e = emb(vec![3.0, 4.0]);
        assert_eq!(cluster_dbscan(&e, 0.1, 1).unwrap(), vec![0]);
    }

    #[test]
    fn border_points_join_first_cluster() {
        // 0-1-2 chain with min_pts 3: only 1 is core, 0 and 2 are borders
        let e = emb(vec![0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 10.0, 0.0]);
        assert_eq!(cluster_dbscan(&e, 1.0, 3).unwrap(), vec![0, 0, 0, NOISE]);
    }

    #[test]
    fn invariant_under_rigid_motion() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let c = blobs(&mut rng);
        let base = cluster_dbscan(&emb(c.clone()), 1.2, 5).unwrap();
        let (s, co) = 1.1f64.sin_cos();
        let moved: Vec<f64> = c
            .chunks(2)
            .flat_map(|p| [co * p[0] - s * p[1] + 3.0, s * p[0] + co * p[1] - 7.0])
            .collect();
        assert_eq!(cluster_dbscan(&emb(moved), 1.2, 5).unwrap(), base);
    }

    #[test]
    fn rejects_bad_parameters() {
        let e = emb(vec![0.0, 0.0]);
        assert!(cluster_dbscan(&e, 0.0, 1).is_err());
        assert!(cluster_dbscan(&e, 1.0, 0).is_err());
    }
}
