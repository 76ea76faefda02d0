//! Runs every kernel over five seeds on Iris, clusters each embedding with
//! DBSCAN and prints per-kernel medians of ARS, AMIS and silhouette.
//!
//! cargo run --release --example bench_iris

use kernel_umap::eval::ScoreReport;
use kernel_umap::pipeline::{bench_dataset, RunConfig};
use kernel_umap::{io, KernelId};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn main() -> kernel_umap::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/iris.csv");
    let data = io::load_csv(path, Some("species"))?;
    let cfg = RunConfig {
        input_path: path.into(),
        label_column: Some("species".into()),
        ..RunConfig::default()
    };
    let seeds = [1, 2, 3, 4, 5];
    let reports = bench_dataset(&data, &cfg, &KernelId::ALL, &seeds)?;
    println!(
        "DBSCAN eps = {}, min_pts = {}; medians over {} seeds",
        cfg.dbscan.eps,
        cfg.dbscan.min_pts,
        seeds.len()
    );
    println!(
        "{:<12}{:>9}{:>9}{:>12}{:>10}",
        "kernel", "ARS", "AMIS", "silhouette", "clusters"
    );
    for kernel in KernelId::ALL {
        let rows: Vec<&ScoreReport> = reports.iter().filter(|r| r.kernel == kernel).collect();
        let col = |f: fn(&ScoreReport) -> f64| median(rows.iter().map(|r| f(r)).collect());
        println!(
            "{:<12}{:>9.5}{:>9.5}{:>12.5}{:>10}",
            kernel.name(),
            col(|r| r.ars),
            col(|r| r.amis),
            col(|r| r.silhouette),
            col(|r| r.n_clusters_found as f64)
        );
    }
    Ok(())
}
