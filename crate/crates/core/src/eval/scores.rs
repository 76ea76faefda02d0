//! Partition-agreement and geometric clustering scores.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::data::Embedding;
use crate::error::{Error, Result};

use super::cluster::NOISE;

struct Contingency {
    n: usize,
    /// Non-zero cells `(row, col, n_ij)`.
    cells: Vec<(usize, usize, usize)>,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

fn contingency(labels_true: &[i64], labels_pred: &[i64]) -> Result<Contingency> {
    if labels_true.len() != labels_pred.len() {
        return Err(Error::usage(format!(
            "label vectors differ in length: {} vs {}",
            labels_true.len(),
            labels_pred.len()
        )));
    }
    if labels_true.len() < 2 {
        return Err(Error::usage("at least two labelled points are required"));
    }
    let mut cells: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut rows: BTreeMap<i64, usize> = BTreeMap::new();
    let mut cols: BTreeMap<i64, usize> = BTreeMap::new();
    for (&t, &p) in labels_true.iter().zip(labels_pred) {
        *cells.entry((t, p)).or_default() += 1;
        *rows.entry(t).or_default() += 1;
        *cols.entry(p).or_default() += 1;
    }
    let row_ids: Vec<i64> = rows.keys().copied().collect();
    let col_ids: Vec<i64> = cols.keys().copied().collect();
    let cells = cells
        .into_iter()
        .map(|((t, p), count)| {
            let r = row_ids.binary_search(&t).expect("row label present");
            let c = col_ids.binary_search(&p).expect("column label present");
            (r, c, count)
        })
        .collect();
    Ok(Contingency {
        n: labels_true.len(),
        cells,
        rows: rows.into_values().collect(),
        cols: cols.into_values().collect(),
    })
}

impl Contingency {
    /// Both partitions are the same up to relabelling.
    fn identical(&self) -> bool {
        self.cells.len() == self.rows.len() && self.cells.len() == self.cols.len()
    }
}

fn comb2(x: usize) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// Adjusted Rand index under the permutation model.
///
/// Identical partitions score 1.0.
pub fn adjusted_rand(labels_true: &[i64], labels_pred: &[i64]) -> Result<f64> {
    let c = contingency(labels_true, labels_pred)?;
    if c.identical() {
        return Ok(1.0);
    }
    let index: f64 = c.cells.iter().map(|&(_, _, x)| comb2(x)).sum();
    let sum_rows: f64 = c.rows.iter().map(|&x| comb2(x)).sum();
    let sum_cols: f64 = c.cols.iter().map(|&x| comb2(x)).sum();
    let expected = sum_rows * sum_cols / comb2(c.n);
    let max_index = 0.5 * (sum_rows + sum_cols);
    let denom = max_index - expected;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((index - expected) / denom)
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

fn entropy_of(counts: &[usize], n: usize) -> f64 {
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Expected mutual information of two partitions with the given marginals
/// under the hypergeometric permutation model.
fn expected_mutual_info(rows: &[usize], cols: &[usize], n: usize) -> f64 {
    let lf = ln_factorials(n);
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in rows {
        for &b in cols {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            let fixed = lf[a] + lf[b] + lf[n - a] + lf[n - b] - lf[n];
            for nij in lo..=hi {
                let x = nij as f64;
                let log_p = fixed - lf[nij] - lf[a - nij] - lf[b - nij] - lf[n + nij - a - b];
                emi += x / nf * (nf * x / (a as f64 * b as f64)).ln() * log_p.exp();
            }
        }
    }
    emi
}

/// Adjusted mutual information, normalised by the larger of the two
/// entropies.
///
/// Identical partitions score 1.0; otherwise a single-cluster partition on
/// either side scores 0.0.
pub fn adjusted_mutual_info(labels_true: &[i64], labels_pred: &[i64]) -> Result<f64> {
    let c = contingency(labels_true, labels_pred)?;
    if c.identical() {
        return Ok(1.0);
    }
    if c.rows.len() == 1 || c.cols.len() == 1 {
        return Ok(0.0);
    }
    let nf = c.n as f64;
    let h_true = entropy_of(&c.rows, c.n);
    let h_pred = entropy_of(&c.cols, c.n);
    let mi: f64 = c
        .cells
        .iter()
        .map(|&(r, col, nij)| {
            let x = nij as f64;
            x / nf * (nf * x / (c.rows[r] as f64 * c.cols[col] as f64)).ln()
        })
        .sum();
    let emi = expected_mutual_info(&c.rows, &c.cols, c.n);
    let denom = h_true.max(h_pred) - emi;
    let denom = if denom < 0.0 {
        denom.min(-f64::EPSILON)
    } else {
        denom.max(f64::EPSILON)
    };
    Ok((mi - emi) / denom)
}

/// Mean silhouette over non-noise points.
///
/// A point alone in its cluster scores 0. Fails when fewer than two
/// clusters remain after dropping noise.
pub fn silhouette(emb: &Embedding, labels: &[i64]) -> Result<f64> {
    if labels.len() != emb.n_points() {
        return Err(Error::usage(format!(
            "{} labels for {} embedded points",
            labels.len(),
            emb.n_points()
        )));
    }
    let kept: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] != NOISE).collect();
    let mut ids: Vec<i64> = kept.iter().map(|&i| labels[i]).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < 2 {
        return Err(Error::usage(format!(
            "silhouette is undefined for {} cluster(s)",
            ids.len()
        )));
    }
    let slot = |l: i64| ids.binary_search(&l).expect("label collected above");
    let mut sizes = vec![0usize; ids.len()];
    for &i in &kept {
        sizes[slot(labels[i])] += 1;
    }
    let scores: Vec<f64> = kept
        .par_iter()
        .map(|&i| {
            let own = slot(labels[i]);
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; ids.len()];
            for &j in &kept {
                if j != i {
                    sums[slot(labels[j])] += emb.dist_sq(i, j).sqrt();
                }
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..ids.len())
                .filter(|&c| c != own)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m > 0.0 {
                (b - a) / m
            } else {
                0.0
            }
        })
        .collect();
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}
