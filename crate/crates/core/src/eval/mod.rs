//! Divergences between the two weight fields and clustering-quality scores.

mod cluster;
mod divergence;
mod report;
mod scores;

pub use cluster::{cluster_dbscan, n_clusters, NOISE};
pub use divergence::{cross_entropy, entropy, kl_divergence, EdgeSet};
pub use report::{score_embedding, DbscanParams, ScoreReport, CSV_HEADER};
pub use scores::{adjusted_mutual_info, adjusted_rand, silhouette};
