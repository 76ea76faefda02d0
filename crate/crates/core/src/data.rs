//! Shared data types: the input sample, its kNN graph, the weighted fuzzy
//! graph built on top of it and the low-dimensional embedding.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::CurveParams;

/// A distance function on coordinate vectors.
///
/// Implementations must be symmetric, non-negative and zero on identical
/// inputs. Inputs are assumed to have equal length.
pub trait Metric: Sync {
    fn distance(&self, u: &[f64], v: &[f64]) -> f64;
}

/// Ambient Euclidean distance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Euclidean;

impl Metric for Euclidean {
    #[inline]
    fn distance(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

/// `‖u − v‖₂`, failing on a length mismatch.
pub fn euclidean_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::usage(format!(
            "vector length mismatch: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    Ok(Euclidean.distance(u, v))
}

/// N points in ℝ^m stored row-major, with optional class labels and ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<f64>,
    n_points: usize,
    dim: usize,
    labels: Option<Vec<i64>>,
    ids: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset from row-major coordinates.
    pub fn new(points: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::data("dataset must have at least one column"));
        }
        if !points.len().is_multiple_of(dim) {
            return Err(Error::data(format!(
                "{} values do not fill rows of width {dim}",
                points.len()
            )));
        }
        let n_points = points.len() / dim;
        if n_points < 2 {
            return Err(Error::data(format!("dataset needs at least 2 points, got {n_points}")));
        }
        if let Some(pos) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!(
                "non-finite coordinate at row {}, column {}",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self {
            points,
            n_points,
            dim,
            labels: None,
            ids: None,
        })
    }

    /// Builds a dataset from a slice of rows of equal width.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut points = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::data(format!(
                    "row {i} has {} columns, expected {dim}",
                    row.len()
                )));
            }
            points.extend_from_slice(row);
        }
        Self::new(points, dim)
    }

    pub fn with_labels(mut self, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != self.n_points {
            return Err(Error::data(format!(
                "{} labels for {} points",
                labels.len(),
                self.n_points
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n_points {
            return Err(Error::data(format!("{} ids for {} points", ids.len(), self.n_points)));
        }
        self.ids = Some(ids);
        Ok(self)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn ids(&self) -> Option<&[String]> {
        self.ids.as_deref()
    }

    /// Row identifier: the stored id, or the row index.
    pub fn id(&self, i: usize) -> String {
        match &self.ids {
            Some(ids) => ids[i].clone(),
            None => i.to_string(),
        }
    }

    /// Keeps the given rows, in the given order.
    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        let mut points = Vec::with_capacity(rows.len() * self.dim);
        for &r in rows {
            points.extend_from_slice(self.point(r));
        }
        let mut out = Self::new(points, self.dim)?;
        if let Some(labels) = &self.labels {
            out.labels = Some(rows.iter().map(|&r| labels[r]).collect());
        }
        if let Some(ids) = &self.ids {
            out.ids = Some(rows.iter().map(|&r| ids[r].clone()).collect());
        }
        Ok(out)
    }
}

/// Exact k nearest neighbours of every point.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnGraph {
    k: usize,
    neighbors: Vec<usize>,
    distances: Vec<f64>,
}

impl KnnGraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_points(&self) -> usize {
        self.neighbors.len() / self.k
    }

    /// Neighbour indices of point `i`, nearest first.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i * self.k..(i + 1) * self.k]
    }

    /// Distances matching [`KnnGraph::neighbors`], ascending.
    pub fn distances(&self, i: usize) -> &[f64] {
        &self.distances[i * self.k..(i + 1) * self.k]
    }
}

/// Brute-force exact kNN under the Euclidean metric.
pub fn build_knn(data: &Dataset, k: usize) -> Result<KnnGraph> {
    build_knn_with(data, k, &Euclidean)
}

/// Brute-force exact kNN under an arbitrary metric.
///
/// Ties in distance are broken by the smaller index, so results are
/// independent of thread scheduling.
pub fn build_knn_with<M: Metric>(data: &Dataset, k: usize, metric: &M) -> Result<KnnGraph> {
    let n = data.n_points();
    if k == 0 || k >= n {
        return Err(Error::usage(format!("k must satisfy 1 <= k < N (k = {k}, N = {n})")));
    }
    let rows: Vec<(Vec<usize>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = data.point(i);
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (metric.distance(xi, data.point(j)), j))
                .collect();
            let by_dist_then_index = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < cand.len() {
                cand.select_nth_unstable_by(k - 1, by_dist_then_index);
                cand.truncate(k);
            }
            cand.sort_unstable_by(by_dist_then_index);
            cand.into_iter().map(|(d, j)| (j, d)).unzip()
        })
        .collect();

    let mut neighbors = Vec::with_capacity(n * k);
    let mut distances = Vec::with_capacity(n * k);
    for (nb, ds) in rows {
        neighbors.extend(nb);
        distances.extend(ds);
    }
    for (idx, d) in distances.iter().enumerate() {
        if !d.is_finite() {
            return Err(Error::data(format!("non-finite distance from point {}", idx / k)));
        }
    }
    Ok(KnnGraph {
        k,
        neighbors,
        distances,
    })
}

/// An undirected edge `i < j` carrying a Bernoulli parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Symmetric weighted graph; each `(i, j)` entry stands for both directions.
///
/// Edges are kept sorted lexicographically by `(i, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyGraph {
    n_vertices: usize,
    edges: Vec<Edge>,
}

impl FuzzyGraph {
    /// Validates and sorts an edge list. Pairs given as `(j, i)` are flipped.
    pub fn from_edges(n_vertices: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| if e.i > e.j { Edge { i: e.j, j: e.i, ..e } } else { e })
            .collect();
        for e in &edges {
            if e.i == e.j {
                return Err(Error::data(format!("self-loop on vertex {}", e.i)));
            }
            if e.j >= n_vertices {
                return Err(Error::data(format!(
                    "edge ({}, {}) out of range for {n_vertices} vertices",
                    e.i, e.j
                )));
            }
            if !(0.0..=1.0).contains(&e.weight) {
                return Err(Error::data(format!(
                    "edge ({}, {}) weight {} outside [0, 1]",
                    e.i, e.j, e.weight
                )));
            }
        }
        edges.sort_unstable_by_key(|e| (e.i, e.j));
        if let Some(w) = edges.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::data(format!("duplicate edge ({}, {})", w[0].i, w[0].j)));
        }
        Ok(Self { n_vertices, edges })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Weight of `(i, j)` in either orientation, if the edge exists.
    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edges
            .binary_search_by(|e| (e.i, e.j).cmp(&key))
            .ok()
            .map(|pos| self.edges[pos].weight)
    }

    /// Sorted adjacency lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }
}

/// Low-dimensional coordinates together with the weight-curve parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    coords: Vec<f64>,
    n_points: usize,
    dim: usize,
    curve: CurveParams,
    min_dist: f64,
}

impl Embedding {
    pub fn new(coords: Vec<f64>, dim: usize, curve: CurveParams, min_dist: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("embedding dimension must be >= 1"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::usage(format!(
                "{} coordinates do not fill rows of width {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::numeric("embedding contains non-finite coordinates"));
        }
        if !(min_dist > 0.0) {
            return Err(Error::usage(format!("min_dist must be positive, got {min_dist}")));
        }
        Ok(Self {
            n_points: coords.len() / dim,
            coords,
            dim,
            curve,
            min_dist,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn curve(&self) -> CurveParams {
        self.curve
    }

    pub fn min_dist(&self) -> f64 {
        self.min_dist
    }

    /// Squared Euclidean distance between embedded points `i` and `j`.
    pub fn dist_sq(&self, i: usize, j: usize) -> f64 {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Returns a copy with different coordinates and the same curve.
    pub fn with_coords(&self, coords: Vec<f64>) -> Result<Self> {
        Self::new(coords, self.dim, self.curve, self.min_dist)
    }
}
