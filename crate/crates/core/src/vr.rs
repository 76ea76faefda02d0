//! Vietoris–Rips edge weighting.
//!
//! Points closer than `δ` are joined in a neighbour graph whose cliques, up
//! to a dimension cap, form the simplices of the complex. Each simplex gets a
//! single belief by folding the probabilistic OR over the directed
//! probabilities of its edges, and each edge then takes the geometric mean of
//! the beliefs of every simplex containing it.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{build_knn, Dataset, Edge, Euclidean, FuzzyGraph, Metric};
use crate::error::{Error, Result};
use crate::fuzzy::{prob_or, DirectedProbabilities, LocalScale};
use crate::kernel::KernelId;

pub const DEFAULT_MAX_DIM: usize = 2;
pub const DEFAULT_BUDGET: usize = 10_000_000;

/// `x + y − xy`, checked.
pub fn fuzzy_or(x: f64, y: f64) -> Result<f64> {
    for v in [x, y] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::usage(format!("probability {v} outside [0, 1]")));
        }
    }
    Ok(prob_or(x, y))
}

/// Folds [`fuzzy_or`] over a sequence, starting from the identity 0.
pub fn fuzzy_or_fold(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, prob_or)
}

/// Undirected simple graph with sorted adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborGraph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl NeighborGraph {
    pub fn from_edges(n_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b || a.max(b) >= n_vertices {
                return Err(Error::usage(format!(
                    "invalid edge ({a}, {b}) for {n_vertices} vertices"
                )));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        let mut adjacency = vec![Vec::new(); n_vertices];
        for &(a, b) in &list {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Ok(Self {
            n_vertices,
            edges: list,
            adjacency,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }
}

/// All pairs at distance ≤ `delta`.
pub fn build_delta_graph(data: &Dataset, delta: f64) -> Result<NeighborGraph> {
    build_delta_graph_with(data, delta, &Euclidean)
}

pub fn build_delta_graph_with<M: Metric>(data: &Dataset, delta: f64, metric: &M) -> Result<NeighborGraph> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::usage(format!("delta must be positive and finite, got {delta}")));
    }
    let n = data.n_points();
    let rows: Vec<Vec<(usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .filter(|&j| metric.distance(data.point(i), data.point(j)) <= delta)
                .map(|j| (i, j))
                .collect()
        })
        .collect();
    NeighborGraph::from_edges(n, rows.into_iter().flatten())
}

/// Every clique with 2 to `max_dim + 1` vertices, each sorted ascending and
/// the list sorted lexicographically.
///
/// Cliques are grown one vertex at a time, only ever adding a vertex larger
/// than the current maximum that is adjacent to all members, so each clique
/// is produced exactly once and in lexicographic order.
pub fn enumerate_cliques(graph: &NeighborGraph, max_dim: usize, budget: usize) -> Result<Vec<Vec<usize>>> {
    if max_dim == 0 {
        return Err(Error::usage("max_dim must be >= 1"));
    }
    let mut out = Vec::new();
    let mut clique = Vec::with_capacity(max_dim + 1);
    for v in 0..graph.n_vertices() {
        let higher: Vec<usize> = graph.neighbors(v).iter().copied().filter(|&u| u > v).collect();
        clique.push(v);
        extend(graph, &mut clique, &higher, max_dim + 1, budget, &mut out)?;
        clique.pop();
    }
    Ok(out)
}

fn extend(
    graph: &NeighborGraph,
    clique: &mut Vec<usize>,
    candidates: &[usize],
    max_size: usize,
    budget: usize,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    for (pos, &u) in candidates.iter().enumerate() {
        clique.push(u);
        if out.len() >= budget {
            return Err(Error::Budget { budget });
        }
        out.push(clique.clone());
        if clique.len() < max_size {
            let next: Vec<usize> = candidates[pos + 1..]
                .iter()
                .copied()
                .filter(|&w| graph.has_edge(u, w))
                .collect();
            if !next.is_empty() {
                extend(graph, clique, &next, max_size, budget, out)?;
            }
        }
        clique.pop();
    }
    Ok(())
}

/// Which directed probabilities enter a simplex's fold.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeliefMode {
    /// Both `p_{a|b}` and `p_{b|a}` for every edge `a < b`.
    #[default]
    BothDirections,
    /// Only `p_{a|b}` for every edge `a < b`.
    Forward,
}

/// OR-fold over the edge probabilities of a simplex (vertices sorted).
///
/// Equals `1 − ∏ (1 − p)` over the folded probabilities; missing directed
/// entries contribute 0.
pub fn simplex_belief(simplex: &[usize], directed: &DirectedProbabilities, mode: BeliefMode) -> f64 {
    let mut p = 0.0;
    for (s, &a) in simplex.iter().enumerate() {
        for &b in &simplex[s + 1..] {
            p = prob_or(p, directed.get_or_zero(a, b));
            if mode == BeliefMode::BothDirections {
                p = prob_or(p, directed.get_or_zero(b, a));
            }
        }
    }
    p
}

/// Parameters of the Vietoris–Rips construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VrParams {
    pub delta: f64,
    pub max_dim: usize,
    pub budget: usize,
    pub mode: BeliefMode,
}

impl VrParams {
    pub fn new(delta: f64) -> Self {
        Self {
            delta,
            max_dim: DEFAULT_MAX_DIM,
            budget: DEFAULT_BUDGET,
            mode: BeliefMode::default(),
        }
    }
}

/// Clique complex of the δ-graph with one belief per simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct VrComplex {
    pub delta: f64,
    pub max_dim: usize,
    pub n_vertices: usize,
    pub simplices: Vec<Vec<usize>>,
    pub beliefs: Vec<f64>,
}

impl VrComplex {
    pub fn build(
        graph: &NeighborGraph,
        directed: &DirectedProbabilities,
        delta: f64,
        max_dim: usize,
        budget: usize,
        mode: BeliefMode,
    ) -> Result<Self> {
        let simplices = enumerate_cliques(graph, max_dim, budget)?;
        let beliefs = simplices
            .par_iter()
            .map(|s| simplex_belief(s, directed, mode))
            .collect();
        Ok(Self {
            delta,
            max_dim,
            n_vertices: graph.n_vertices(),
            simplices,
            beliefs,
        })
    }

    /// Number of stored simplices with `d + 1` vertices.
    pub fn count_of_dim(&self, d: usize) -> usize {
        self.simplices.iter().filter(|s| s.len() == d + 1).count()
    }
}

/// Geometric mean of the beliefs of all simplices containing each edge.
pub fn aggregate_edge_weights(complex: &VrComplex) -> Result<FuzzyGraph> {
    // per edge: (sum of ln beliefs, count, first belief, saw a zero)
    let mut acc: HashMap<(usize, usize), (f64, usize, f64, bool)> = HashMap::new();
    let mut order = Vec::new();
    for (simplex, &belief) in complex.simplices.iter().zip(&complex.beliefs) {
        for (s, &a) in simplex.iter().enumerate() {
            for &b in &simplex[s + 1..] {
                let entry = acc.entry((a, b)).or_insert_with(|| {
                    order.push((a, b));
                    (0.0, 0, belief, false)
                });
                if belief <= 0.0 {
                    entry.3 = true;
                } else {
                    entry.0 += belief.ln();
                }
                entry.1 += 1;
            }
        }
    }
    let edges = order.into_iter().map(|key| {
        let (log_sum, count, first, zero) = acc[&key];
        let weight = if zero {
            0.0
        } else if count == 1 {
            first
        } else {
            (log_sum / count as f64).exp().min(1.0)
        };
        Edge {
            i: key.0,
            j: key.1,
            weight,
        }
    });
    FuzzyGraph::from_edges(complex.n_vertices, edges)
}

/// Output of the full Vietoris–Rips weighting pipeline.
#[derive(Debug, Clone)]
pub struct VrWeighting {
    pub graph: FuzzyGraph,
    pub complex: VrComplex,
    pub scale: LocalScale,
}

/// kNN local scales → δ-graph → clique complex → aggregated edge weights.
///
/// ρ and σ come from the `k`-nearest-neighbour structure; directed
/// probabilities are then evaluated for both orientations of every δ-edge.
pub fn build_vr_fuzzy_graph(data: &Dataset, k: usize, kernel: KernelId, params: &VrParams) -> Result<VrWeighting> {
    let knn = build_knn(data, k)?;
    let scale = LocalScale::compute(&knn, kernel);
    let graph = build_delta_graph(data, params.delta)?;
    let directed = DirectedProbabilities::for_pairs(data, &Euclidean, &scale, kernel, graph.edges().iter().copied());
    let complex = VrComplex::build(
        &graph,
        &directed,
        params.delta,
        params.max_dim,
        params.budget,
        params.mode,
    )?;
    let fuzzy = aggregate_edge_weights(&complex)?;
    Ok(VrWeighting {
        graph: fuzzy,
        complex,
        scale,
    })
}
