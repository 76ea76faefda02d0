//! Fits the low-dimensional similarity curve `(1 + a d^2b)^-1` for several
//! values of `min_dist` and prints the profile it approximates.
//!
//! cargo run --example curve_fit

use kernel_umap::low_dim_weight;
use kernel_umap::optimize::{fit_curve_report, target_profile};

fn main() -> kernel_umap::Result<()> {
    println!("{:>9}{:>10}{:>10}{:>12}", "min_dist", "a", "b", "rms");
    for min_dist in [0.001, 0.01, 0.1, 0.25, 0.5, 1.0] {
        let fit = fit_curve_report(min_dist)?;
        println!(
            "{min_dist:>9}{:>10.5}{:>10.5}{:>12.2e}",
            fit.params.a, fit.params.b, fit.rms_residual
        );
    }

    let fit = fit_curve_report(0.001)?;
    println!("\nmin_dist = 0.001");
    println!("{:>6}{:>10}{:>10}", "d", "target", "fitted");
    for d in [0.001, 0.1, 0.5, 1.0, 2.0, 3.0] {
        println!(
            "{d:>6}{:>10.4}{:>10.4}",
            target_profile(d, 0.001),
            low_dim_weight(d * d, fit.params)
        );
    }
    Ok(())
}
