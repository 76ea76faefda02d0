//! Conformal rescaling of the kNN graph into a symmetric fuzzy graph.
//!
//! For every point `i` the distance to its nearest neighbour `ρ_i` is
//! subtracted from all of its neighbour distances, and a scale `σ_i` is
//! searched for so that the directed beliefs `p_{i|j}` over the k neighbours
//! sum to `log₂ k`. Directed beliefs are then merged with a probabilistic OR.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::data::{Dataset, Edge, FuzzyGraph, KnnGraph, Metric};
use crate::error::{Error, Result};
use crate::kernel::{eval_unchecked, KernelId};

/// Bracket and stopping rule for the per-point scale search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaSearch {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub max_iter: usize,
    pub tolerance: f64,
}

impl Default for SigmaSearch {
    fn default() -> Self {
        Self {
            sigma_min: 1e-6,
            sigma_max: 1e3,
            max_iter: 100,
            tolerance: 1e-5,
        }
    }
}

/// Outcome of the scale search for one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaSolution {
    pub sigma: f64,
    /// Neighbour sum `Σ_j p_{i|j}` reached at `sigma`.
    pub achieved: f64,
    /// Set when the target could not be met within tolerance.
    pub flagged: bool,
    pub iterations: usize,
}

/// ρ and σ for every point, plus search diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalScale {
    pub rho: Vec<f64>,
    pub sigma: Vec<f64>,
    pub achieved: Vec<f64>,
    pub flagged: Vec<bool>,
    /// `log₂ k`.
    pub target: f64,
}

impl LocalScale {
    pub fn compute(knn: &KnnGraph, kernel: KernelId) -> Self {
        Self::compute_with(knn, kernel, &SigmaSearch::default())
    }

    pub fn compute_with(knn: &KnnGraph, kernel: KernelId, search: &SigmaSearch) -> Self {
        let solutions: Vec<SigmaSolution> = (0..knn.n_points())
            .into_par_iter()
            .map(|i| solve_point(knn, kernel, i, search))
            .collect();
        Self {
            rho: (0..knn.n_points()).map(|i| knn.distances(i)[0]).collect(),
            sigma: solutions.iter().map(|s| s.sigma).collect(),
            achieved: solutions.iter().map(|s| s.achieved).collect(),
            flagged: solutions.iter().map(|s| s.flagged).collect(),
            target: (knn.k() as f64).log2(),
        }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// `|Σ_j p_{i|j} − log₂ k|` for point `i`.
    pub fn residual(&self, i: usize) -> f64 {
        (self.achieved[i] - self.target).abs()
    }

    pub fn n_flagged(&self) -> usize {
        self.flagged.iter().filter(|&&f| f).count()
    }

    /// Largest residual over unflagged points (0 when every point is flagged).
    pub fn max_unflagged_residual(&self) -> f64 {
        (0..self.len())
            .filter(|&i| !self.flagged[i])
            .map(|i| self.residual(i))
            .fold(0.0, f64::max)
    }

    /// Directed belief `p_{i|j}` for a point `i` at distance `dist` from `j`.
    #[inline]
    pub fn directed(&self, kernel: KernelId, i: usize, dist: f64) -> f64 {
        eval_unchecked(kernel, (dist - self.rho[i]).max(0.0), self.sigma[i])
    }
}

fn neighbour_sum(kernel: KernelId, dists: &[f64], rho: f64, sigma: f64) -> f64 {
    dists
        .iter()
        .map(|&d| eval_unchecked(kernel, (d - rho).max(0.0), sigma))
        .sum()
}

fn solve_point(knn: &KnnGraph, kernel: KernelId, i: usize, search: &SigmaSearch) -> SigmaSolution {
    let dists = knn.distances(i);
    let rho = dists[0];
    let target = (knn.k() as f64).log2();
    let tol = search.tolerance;
    let done = |sigma: f64, achieved: f64, iterations: usize| SigmaSolution {
        sigma,
        achieved,
        flagged: !((achieved - target).abs() <= tol),
        iterations,
    };

    if !kernel.depends_on_scale() {
        return done(search.sigma_max, neighbour_sum(kernel, dists, rho, 1.0), 0);
    }

    let lo_sum = neighbour_sum(kernel, dists, rho, search.sigma_min);
    let hi_sum = neighbour_sum(kernel, dists, rho, search.sigma_max);
    if lo_sum == hi_sum {
        // sum pinned, e.g. every neighbour at distance ρ
        return done(search.sigma_max, hi_sum, 0);
    }
    if target <= lo_sum {
        return done(search.sigma_min, lo_sum, 0);
    }
    if target >= hi_sum {
        return done(search.sigma_max, hi_sum, 0);
    }

    // The sum is non-decreasing in σ; bisect on a log scale.
    let (mut lo, mut hi) = (search.sigma_min, search.sigma_max);
    let mut best = (hi, hi_sum);
    for it in 1..=search.max_iter {
        let mid = (lo * hi).sqrt();
        let s = neighbour_sum(kernel, dists, rho, mid);
        if (s - target).abs() < (best.1 - target).abs() {
            best = (mid, s);
        }
        if (s - target).abs() <= tol {
            return done(mid, s, it);
        }
        if s > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    done(best.0, best.1, search.max_iter)
}

/// Finds σ_i so the neighbour sum of point `i` equals `log₂ k`.
///
/// Unreachable targets return the bracket endpoint and a flag instead of an
/// error. The constant kernel is not searched at all.
pub fn solve_sigma(knn: &KnnGraph, kernel: KernelId, i: usize) -> Result<SigmaSolution> {
    solve_sigma_with(knn, kernel, i, &SigmaSearch::default())
}

pub fn solve_sigma_with(knn: &KnnGraph, kernel: KernelId, i: usize, search: &SigmaSearch) -> Result<SigmaSolution> {
    if i >= knn.n_points() {
        return Err(Error::usage(format!(
            "point {i} out of range for {} points",
            knn.n_points()
        )));
    }
    if !(search.sigma_min > 0.0 && search.sigma_max > search.sigma_min) {
        return Err(Error::usage(format!(
            "invalid sigma bracket [{}, {}]",
            search.sigma_min, search.sigma_max
        )));
    }
    Ok(solve_point(knn, kernel, i, search))
}

/// Probabilistic OR of two independent beliefs: `p + q − pq`.
pub fn symmetrize(p: f64, q: f64) -> Result<f64> {
    for v in [p, q] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::usage(format!("probability {v} outside [0, 1]")));
        }
    }
    Ok(prob_or(p, q))
}

#[inline]
pub(crate) fn prob_or(p: f64, q: f64) -> f64 {
    // ordered form keeps the result exactly commutative and never below either input
    let (hi, lo) = if p >= q { (p, q) } else { (q, p) };
    (hi + lo * (1.0 - hi)).clamp(hi, 1.0)
}

/// Directed edge beliefs `p_{i|j}` keyed by the ordered pair `(i, j)`.
///
/// Pairs that are absent count as probability 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DirectedProbabilities {
    map: BTreeMap<(usize, usize), f64>,
}

impl DirectedProbabilities {
    pub fn new() -> Self {
        Self::default()
    }

    /// `p_{i|j}` for every kNN edge `i → j`.
    pub fn from_knn(knn: &KnnGraph, scale: &LocalScale, kernel: KernelId) -> Self {
        let mut map = BTreeMap::new();
        for i in 0..knn.n_points() {
            for (&j, &d) in knn.neighbors(i).iter().zip(knn.distances(i)) {
                map.insert((i, j), scale.directed(kernel, i, d));
            }
        }
        Self { map }
    }

    /// Both directions of every listed unordered pair, evaluated with the
    /// given local scales.
    pub fn for_pairs<M: Metric>(
        data: &Dataset,
        metric: &M,
        scale: &LocalScale,
        kernel: KernelId,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let mut map = BTreeMap::new();
        for (i, j) in pairs {
            let d = metric.distance(data.point(i), data.point(j));
            map.insert((i, j), scale.directed(kernel, i, d));
            map.insert((j, i), scale.directed(kernel, j, d));
        }
        Self { map }
    }

    pub fn insert(&mut self, i: usize, j: usize, p: f64) {
        self.map.insert((i, j), p);
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.map.get(&(i, j)).copied()
    }

    /// `p_{i|j}`, or 0 when the directed edge is absent.
    pub fn get_or_zero(&self, i: usize, j: usize) -> f64 {
        self.get(i, j).unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Merges both directions of every pair into an undirected fuzzy graph.
    pub fn symmetrized(&self, n_vertices: usize) -> Result<FuzzyGraph> {
        let mut pairs: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
        for (&(i, j), &p) in &self.map {
            let entry = pairs.entry((i.min(j), i.max(j))).or_insert((0.0, 0.0));
            if i < j {
                entry.0 = p;
            } else {
                entry.1 = p;
            }
        }
        FuzzyGraph::from_edges(
            n_vertices,
            pairs.into_iter().map(|((i, j), (p, q))| Edge {
                i,
                j,
                weight: prob_or(p, q),
            }),
        )
    }
}

/// kNN graph → symmetric fuzzy graph under `kernel`.
pub fn build_fuzzy_graph(knn: &KnnGraph, kernel: KernelId) -> Result<FuzzyGraph> {
    build_fuzzy_graph_with_scale(knn, kernel).map(|(g, _)| g)
}

/// Like [`build_fuzzy_graph`], also returning the solved local scales.
pub fn build_fuzzy_graph_with_scale(knn: &KnnGraph, kernel: KernelId) -> Result<(FuzzyGraph, LocalScale)> {
    let scale = LocalScale::compute(knn, kernel);
    let graph = DirectedProbabilities::from_knn(knn, &scale, kernel).symmetrized(knn.n_points())?;
    Ok((graph, scale))
}
