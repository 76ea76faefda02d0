//! Builds Vietoris–Rips edge weights on Iris for a few scales δ and compares
//! them with the plain kNN weighting.
//!
//! cargo run --example vr_weights

use kernel_umap::vr::{build_vr_fuzzy_graph, BeliefMode, VrParams};
use kernel_umap::{build_fuzzy_graph, build_knn, io, KernelId};

fn main() -> kernel_umap::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/iris.csv");
    let data = io::load_csv(path, Some("species"))?;
    let knn_graph = build_fuzzy_graph(&build_knn(&data, 15)?, KernelId::Membership)?;
    let mean = |w: &[f64]| w.iter().sum::<f64>() / w.len().max(1) as f64;
    let knn_w: Vec<f64> = knn_graph.edges().iter().map(|e| e.weight).collect();
    println!(
        "kNN graph: {} edges, mean weight {:.4}\n",
        knn_graph.len(),
        mean(&knn_w)
    );

    println!(
        "{:>5}{:>9}{:>9}{:>11}{:>12}{:>12}",
        "δ", "mode", "edges", "triangles", "mean w", "shared kNN"
    );
    for delta in [0.3, 0.5, 0.8] {
        for mode in [BeliefMode::BothDirections, BeliefMode::Forward] {
            let params = VrParams {
                mode,
                ..VrParams::new(delta)
            };
            let vr = build_vr_fuzzy_graph(&data, 15, KernelId::Membership, &params)?;
            let w: Vec<f64> = vr.graph.edges().iter().map(|e| e.weight).collect();
            let shared = vr
                .graph
                .edges()
                .iter()
                .filter(|e| knn_graph.weight(e.i, e.j).is_some())
                .count();
            let mode = if mode == BeliefMode::Forward { "forward" } else { "both" };
            println!(
                "{delta:>5}{mode:>9}{:>9}{:>11}{:>12.4}{shared:>12}",
                vr.graph.len(),
                vr.complex.count_of_dim(2),
                mean(&w)
            );
        }
    }
    Ok(())
}
