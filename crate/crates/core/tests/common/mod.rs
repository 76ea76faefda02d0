#![allow(dead_code)]

use std::path::PathBuf;

use kernel_umap::{CurveParams, Dataset, Edge, Embedding, FuzzyGraph};
use rand::Rng;

pub fn iris_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/iris.csv")
}

pub fn iris() -> Dataset {
    kernel_umap::io::load_csv(iris_path(), Some("species")).unwrap()
}

/// Random graph on `n` vertices: each pair is an edge with probability
/// `density`, weights uniform in (0, 1].
pub fn random_graph(rng: &mut impl Rng, n: usize, density: f64) -> FuzzyGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                edges.push(Edge {
                    i,
                    j,
                    weight: 1.0 - rng.random::<f64>(),
                });
            }
        }
    }
    FuzzyGraph::from_edges(n, edges).unwrap()
}

pub fn random_embedding(rng: &mut impl Rng, n: usize, dim: usize, spread: f64, curve: CurveParams) -> Embedding {
    let coords = (0..n * dim).map(|_| rng.random_range(-spread..spread)).collect();
    Embedding::new(coords, dim, curve, 0.001).unwrap()
}

pub fn w_low(coords: &[f64], dim: usize, i: usize, j: usize, c: CurveParams) -> f64 {
    let s: f64 = (0..dim)
        .map(|k| (coords[i * dim + k] - coords[j * dim + k]).powi(2))
        .sum();
    1.0 / (1.0 + c.a * s.powf(c.b))
}

/// Loss written directly from its definition, with no shared code.
pub fn oracle_loss(g: &FuzzyGraph, coords: &[f64], dim: usize, c: CurveParams, alpha: f64) -> f64 {
    let n = g.n_vertices();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let w = w_low(coords, dim, i, j, c);
            match g.weight(i, j) {
                Some(wh) => total -= wh * w.ln() + (1.0 - wh) * (1.0 - w).ln(),
                None => total -= alpha * (1.0 - w).ln(),
            }
        }
    }
    total
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}
