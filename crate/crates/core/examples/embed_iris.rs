//! Embeds Iris in two dimensions and writes embedding.csv, run_meta.json and
//! embedding.svg into the given directory (default `target/embed_iris`).
//!
//! cargo run --example embed_iris -- [output_dir] [kernel]

use std::path::PathBuf;

use kernel_umap::pipeline::{run_embed, RunConfig};
use kernel_umap::KernelId;

fn main() -> kernel_umap::Result<()> {
    let mut args = std::env::args().skip(1);
    let output_dir = args
        .next()
        .map_or_else(|| PathBuf::from("target/embed_iris"), PathBuf::from);
    let kernel: KernelId = args.next().as_deref().unwrap_or("membership").parse()?;
    let cfg = RunConfig {
        input_path: concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/iris.csv").into(),
        label_column: Some("species".into()),
        kernel,
        output_dir,
        plot: true,
        ..RunConfig::default()
    };
    let out = run_embed(&cfg)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    let m = &out.meta;
    println!(
        "kernel {kernel}: {} points, {} edges, {} flagged",
        m.n_points, m.n_edges, m.flagged_points
    );
    println!("curve a = {:.5}, b = {:.5}", m.curve_a, m.curve_b);
    println!("final loss {:.4}, KL {:.4}", m.final_loss, m.final_kl_divergence);
    println!("wrote {}", cfg.output_dir.display());
    Ok(())
}
