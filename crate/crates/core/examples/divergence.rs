//! Checks numerically that the KL divergence between the two weight fields
//! differs from the cross-entropy only by the entropy of the input graph,
//! so minimising either gives the same embedding.
//!
//! The gap column stays at rounding level throughout. The totals themselves
//! grow over the epochs: negative sampling applies far less repulsion than
//! the full sum over non-edges, so SGD does not descend this loss directly.
//!
//! cargo run --example divergence

use kernel_umap::eval::{cross_entropy, entropy, kl_divergence, EdgeSet};
use kernel_umap::{build_fuzzy_graph, build_knn, io, optimize, KernelId, OptimizerConfig};

fn main() -> kernel_umap::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/iris.csv");
    let data = io::load_csv(path, Some("species"))?;
    let graph = build_fuzzy_graph(&build_knn(&data, 15)?, KernelId::Membership)?;
    let h = entropy(&graph, EdgeSet::AllPairs);
    println!("H(X) = {h:.6}");
    println!("{:>7}{:>14}{:>14}{:>12}", "epochs", "H(X,Y)", "KL", "gap");
    for n_epochs in [1, 10, 50, 200, 500] {
        let cfg = OptimizerConfig {
            n_epochs,
            ..OptimizerConfig::default()
        };
        let emb = optimize(&graph, &data, &cfg)?;
        let ce = cross_entropy(&graph, &emb, EdgeSet::AllPairs)?;
        let kl = kl_divergence(&graph, &emb, EdgeSet::AllPairs)?;
        println!("{n_epochs:>7}{ce:>14.4}{kl:>14.4}{:>12.2e}", kl - (ce - h));
    }
    Ok(())
}
