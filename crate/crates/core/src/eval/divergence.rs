//! Bernoulli cross-entropy, entropy and KL divergence between the
//! high-dimensional fuzzy graph and the embedding's weight field.

use serde::{Deserialize, Serialize};

use crate::data::{Embedding, FuzzyGraph};
use crate::error::{Error, Result};
use crate::optimize::EPS_LOG;

/// Which pairs the sums run over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeSet {
    /// Only the edges stored in the fuzzy graph.
    FuzzyEdges,
    /// Every unordered pair; pairs without an edge have `w_h = 0`.
    AllPairs,
}

#[inline]
fn ln_guarded(x: f64) -> f64 {
    x.max(EPS_LOG).ln()
}

/// `x ln x` with `0 ln 0 = 0`.
#[inline]
fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// `(w_l, 1 − w_l)` of the embedding at pair `(i, j)`.
fn low_weights(emb: &Embedding, i: usize, j: usize) -> (f64, f64) {
    let c = emb.curve();
    let u = c.a * emb.dist_sq(i, j).powf(c.b);
    (1.0 / (1.0 + u), u / (1.0 + u))
}

/// Calls `f(w_h, i, j)` for every pair in the edge universe, in a fixed
/// order: graph edges first, then (all-pairs mode) the remaining pairs
/// row by row.
fn for_each_pair(fuzzy: &FuzzyGraph, edge_set: EdgeSet, mut f: impl FnMut(f64, usize, usize)) {
    for e in fuzzy.edges() {
        f(e.weight, e.i, e.j);
    }
    if edge_set == EdgeSet::AllPairs {
        let n = fuzzy.n_vertices();
        let mut edges = fuzzy.edges().iter().peekable();
        for i in 0..n {
            for j in i + 1..n {
                if edges.peek().is_some_and(|e| (e.i, e.j) == (i, j)) {
                    edges.next();
                    continue;
                }
                f(0.0, i, j);
            }
        }
    }
}

fn check(fuzzy: &FuzzyGraph, emb: &Embedding) -> Result<()> {
    if fuzzy.n_vertices() != emb.n_points() {
        return Err(Error::usage(format!(
            "graph has {} vertices but embedding has {} points",
            fuzzy.n_vertices(),
            emb.n_points()
        )));
    }
    Ok(())
}

/// `H(X, Y) = −Σ w_h ln w_l + (1 − w_h) ln(1 − w_l)`.
pub fn cross_entropy(fuzzy: &FuzzyGraph, emb: &Embedding, edge_set: EdgeSet) -> Result<f64> {
    check(fuzzy, emb)?;
    let mut total = 0.0;
    for_each_pair(fuzzy, edge_set, |w_h, i, j| {
        let (w, omw) = low_weights(emb, i, j);
        let mut t = 0.0;
        if w_h > 0.0 {
            t += w_h * ln_guarded(w);
        }
        if w_h < 1.0 {
            t += (1.0 - w_h) * ln_guarded(omw);
        }
        total -= t;
    });
    Ok(total)
}

/// Summed Bernoulli entropy `H(X)` of the high-dimensional weights.
pub fn entropy(fuzzy: &FuzzyGraph, edge_set: EdgeSet) -> f64 {
    let mut total = 0.0;
    for_each_pair(fuzzy, edge_set, |w_h, _, _| {
        total -= xlnx(w_h) + xlnx(1.0 - w_h);
    });
    total
}

/// `D_KL(X ‖ Y)`, summed per pair as a Bernoulli KL divergence.
pub fn kl_divergence(fuzzy: &FuzzyGraph, emb: &Embedding, edge_set: EdgeSet) -> Result<f64> {
    check(fuzzy, emb)?;
    let mut total = 0.0;
    for_each_pair(fuzzy, edge_set, |w_h, i, j| {
        let (w, omw) = low_weights(emb, i, j);
        if w_h > 0.0 {
            total += w_h * (w_h.ln() - ln_guarded(w));
        }
        if w_h < 1.0 {
            total += (1.0 - w_h) * ((1.0 - w_h).ln() - ln_guarded(omw));
        }
    });
    Ok(total)
}
