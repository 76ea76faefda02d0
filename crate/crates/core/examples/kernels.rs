//! Compares the six probability kernels: raw values on a small grid, then
//! the σ search on Iris and how many points each kernel leaves flagged.
//!
//! cargo run --example kernels

use kernel_umap::{build_knn, io, kernel_eval, KernelId, LocalScale};

fn main() -> kernel_umap::Result<()> {
    let xs = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];
    print!("{:<12}", "x (y = 1)");
    for x in xs {
        print!("{x:>9}");
    }
    println!();
    for kernel in KernelId::ALL {
        print!("{:<12}", kernel.name());
        for x in xs {
            print!("{:>9.4}", kernel_eval(kernel, x, 1.0)?);
        }
        println!();
    }

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/iris.csv");
    let data = io::load_csv(path, Some("species"))?;
    let knn = build_knn(&data, 15)?;
    println!("\nIris, k = 15, target sum log2 15 = {:.6}", 15f64.log2());
    println!(
        "{:<12}{:>10}{:>16}{:>14}",
        "kernel", "flagged", "max residual", "median σ"
    );
    for kernel in KernelId::ALL {
        let scale = LocalScale::compute(&knn, kernel);
        let mut sigma = scale.sigma.clone();
        sigma.sort_by(f64::total_cmp);
        println!(
            "{:<12}{:>10}{:>16.3e}{:>14.5}",
            kernel.name(),
            scale.n_flagged(),
            scale.max_unflagged_residual(),
            sigma[sigma.len() / 2]
        );
    }
    Ok(())
}
