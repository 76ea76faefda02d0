use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::Embedding;
use crate::error::{Error, Result};
use crate::kernel::KernelId;

use super::cluster::{cluster_dbscan, n_clusters};
use super::scores::{adjusted_mutual_info, adjusted_rand, silhouette};

/// Clustering scores of one embedding run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub kernel: KernelId,
    pub ars: f64,
    pub amis: f64,
    pub silhouette: f64,
    pub n_clusters_found: usize,
    pub seed: u64,
}

pub const CSV_HEADER: &str = "kernel,ars,amis,silhouette,seed";

impl ScoreReport {
    /// One `scores.csv` row, scores to 5 decimals.
    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{:.5},{:.5},{:.5},{}",
            self.kernel, self.ars, self.amis, self.silhouette, self.seed
        );
        s
    }
}

/// Density parameters used to cluster an embedding before scoring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbscanParams {
    pub eps: f64,
    pub min_pts: usize,
}

impl Default for DbscanParams {
    fn default() -> Self {
        Self { eps: 0.5, min_pts: 5 }
    }
}

/// Clusters `emb` and scores the result against `labels_true`.
///
/// ARS and AMIS treat noise as one more predicted group. Silhouette drops
/// noise points and is reported as 0 when fewer than two clusters are found.
pub fn score_embedding(
    emb: &Embedding,
    labels_true: &[i64],
    dbscan: DbscanParams,
    kernel: KernelId,
    seed: u64,
) -> Result<ScoreReport> {
    if labels_true.len() != emb.n_points() {
        return Err(Error::usage(format!(
            "{} labels for {} embedded points",
            labels_true.len(),
            emb.n_points()
        )));
    }
    let pred = cluster_dbscan(emb, dbscan.eps, dbscan.min_pts)?;
    let found = n_clusters(&pred);
    let sil = if found >= 2 { silhouette(emb, &pred)? } else { 0.0 };
    Ok(ScoreReport {
        kernel,
        ars: adjusted_rand(labels_true, &pred)?,
        amis: adjusted_mutual_info(labels_true, &pred)?,
        silhouette: sil,
        n_clusters_found: found,
        seed,
    })
}
