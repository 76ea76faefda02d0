//! Scores a hand-built embedding: DBSCAN clusters, then ARS, AMIS and
//! silhouette against known labels.
//!
//! cargo run --example clustering_scores

use kernel_umap::eval::{adjusted_mutual_info, adjusted_rand, cluster_dbscan, silhouette, NOISE};
use kernel_umap::{CurveParams, Embedding};

fn main() -> kernel_umap::Result<()> {
    // three blobs and one stray point
    let centers = [(0.0, 0.0), (6.0, 0.0), (3.0, 5.0)];
    let mut coords = Vec::new();
    let mut truth = Vec::new();
    for (c, &(cx, cy)) in centers.iter().enumerate() {
        for k in 0..12 {
            let t = k as f64 * 0.52;
            coords.extend([
                cx + 0.6 * t.cos() * (k % 3) as f64 / 2.0,
                cy + 0.6 * t.sin() * (k % 4) as f64 / 3.0,
            ]);
            truth.push(c as i64);
        }
    }
    coords.extend([3.0, 12.0]);
    truth.push(2);
    let emb = Embedding::new(coords, 2, CurveParams::new(1.93, 0.79)?, 0.001)?;

    for eps in [0.2, 0.5, 1.0, 4.0] {
        let pred = cluster_dbscan(&emb, eps, 3)?;
        let noise = pred.iter().filter(|&&l| l == NOISE).count();
        let sil = silhouette(&emb, &pred).map_or("n/a".to_owned(), |s| format!("{s:.4}"));
        println!(
            "eps {eps:>4}: ARS {:>7.4}  AMIS {:>7.4}  silhouette {sil:>7}  noise {noise}",
            adjusted_rand(&truth, &pred)?,
            adjusted_mutual_info(&truth, &pred)?
        );
    }
    Ok(())
}
