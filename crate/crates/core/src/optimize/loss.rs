//! Full-batch attraction + repulsion cross-entropy and its analytic gradient.
//!
//! Over the fuzzy edges the loss is the Bernoulli cross-entropy
//! `−[w_h ln w_l + (1 − w_h) ln(1 − w_l)]`; every other pair contributes
//! `−α ln(1 − w_l)`. Log arguments are clamped at [`EPS_LOG`], and the
//! gradient is the exact derivative of the clamped loss.

use rayon::prelude::*;

use crate::data::{Embedding, FuzzyGraph};
use crate::error::{Error, Result};

pub const EPS_LOG: f64 = 1e-9;

#[inline]
pub(crate) fn guarded_ln(x: f64) -> f64 {
    x.max(EPS_LOG).ln()
}

/// `(w_l, 1 − w_l)` at squared distance `s`, the second computed without
/// cancellation.
#[inline]
pub(crate) fn weight_pair(s: f64, a: f64, b: f64) -> (f64, f64) {
    let u = a * s.powf(b);
    (1.0 / (1.0 + u), u / (1.0 + u))
}

/// Attraction (edge) and repulsion (non-edge) parts of the loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossTerms {
    /// Cross-entropy summed over the fuzzy edges.
    pub attraction: f64,
    /// `−Σ ln(1 − w_l)` over non-edges, before scaling by α.
    pub repulsion: f64,
}

impl LossTerms {
    pub fn total(&self, alpha: f64) -> f64 {
        self.attraction + alpha * self.repulsion
    }
}

pub(crate) fn check_inputs(fuzzy: &FuzzyGraph, emb: &Embedding, alpha: f64) -> Result<()> {
    if fuzzy.n_vertices() != emb.n_points() {
        return Err(Error::usage(format!(
            "graph has {} vertices but embedding has {} points",
            fuzzy.n_vertices(),
            emb.n_points()
        )));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::usage(format!(
            "repulsion coefficient must be positive, got {alpha}"
        )));
    }
    Ok(())
}

/// Upper-triangle neighbours of each vertex, sorted.
fn upper_adjacency(fuzzy: &FuzzyGraph) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); fuzzy.n_vertices()];
    for e in fuzzy.edges() {
        adj[e.i].push(e.j);
    }
    adj
}

pub fn loss_terms(fuzzy: &FuzzyGraph, emb: &Embedding) -> Result<LossTerms> {
    check_inputs(fuzzy, emb, 1.0)?;
    let c = emb.curve();
    let attraction: f64 = fuzzy
        .edges()
        .iter()
        .map(|e| {
            let (w, omw) = weight_pair(emb.dist_sq(e.i, e.j), c.a, c.b);
            -(e.weight * guarded_ln(w) + (1.0 - e.weight) * guarded_ln(omw))
        })
        .sum();
    let upper = upper_adjacency(fuzzy);
    let n = emb.n_points();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut nb = upper[i].iter().peekable();
            let mut acc = 0.0;
            for j in i + 1..n {
                if nb.peek() == Some(&&j) {
                    nb.next();
                    continue;
                }
                let (_, omw) = weight_pair(emb.dist_sq(i, j), c.a, c.b);
                acc -= guarded_ln(omw);
            }
            acc
        })
        .collect();
    Ok(LossTerms {
        attraction,
        repulsion: rows.iter().sum(),
    })
}

/// `H(X, Y) + α · H(X̄, Y)` with guarded logarithms.
pub fn loss(fuzzy: &FuzzyGraph, emb: &Embedding, alpha: f64) -> Result<f64> {
    check_inputs(fuzzy, emb, alpha)?;
    Ok(loss_terms(fuzzy, emb)?.total(alpha))
}

/// `∂L/∂s` for an edge of weight `w_h` at squared distance `s > 0`.
#[inline]
pub(crate) fn edge_dloss_ds(w_h: f64, s: f64, a: f64, b: f64) -> f64 {
    let (w, omw) = weight_pair(s, a, b);
    let mut g = 0.0;
    if w > EPS_LOG {
        // d/ds [-ln w] = a b s^(b-1) w
        g += w_h * a * b * s.powf(b - 1.0) * w;
    }
    if omw > EPS_LOG {
        // d/ds [-ln(1 - w)] = -b w / s
        g -= (1.0 - w_h) * b * w / s;
    }
    g
}

/// `∂/∂s [−ln(1 − w_l)]` at `s > 0`, zero inside the clamp.
#[inline]
pub(crate) fn repulsion_dloss_ds(s: f64, a: f64, b: f64) -> f64 {
    let (w, omw) = weight_pair(s, a, b);
    if omw > EPS_LOG {
        -b * w / s
    } else {
        0.0
    }
}

/// Analytic gradient of [`loss`] with respect to every coordinate,
/// row-major `N × n`.
///
/// Pairs at squared distance exactly 0 contribute nothing: the attractive
/// term's derivative vanishes there for `b > 1/2`, and the repulsive term
/// sits inside the log clamp.
pub fn loss_gradient(fuzzy: &FuzzyGraph, emb: &Embedding, alpha: f64) -> Result<Vec<f64>> {
    check_inputs(fuzzy, emb, alpha)?;
    let c = emb.curve();
    let n = emb.n_points();
    let dim = emb.dim();
    let adjacency = fuzzy.adjacency();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut g = vec![0.0; dim];
            let yi = emb.point(i);
            let mut add = |j: usize, dl_ds: f64| {
                for (gk, (a, b)) in g.iter_mut().zip(yi.iter().zip(emb.point(j))) {
                    *gk += 2.0 * dl_ds * (a - b);
                }
            };
            let mut nb = adjacency[i].iter().peekable();
            for j in 0..n {
                if j == i {
                    continue;
                }
                let s = emb.dist_sq(i, j);
                if nb.peek() == Some(&&j) {
                    nb.next();
                    if s > 0.0 {
                        let w_h = fuzzy.weight(i, j).unwrap_or(0.0);
                        add(j, edge_dloss_ds(w_h, s, c.a, c.b));
                    }
                } else if s > 0.0 {
                    add(j, alpha * repulsion_dloss_ds(s, c.a, c.b));
                }
            }
            g
        })
        .collect();
    let grad: Vec<f64> = rows.into_iter().flatten().collect();
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::numeric("non-finite loss gradient"));
    }
    Ok(grad)
}
