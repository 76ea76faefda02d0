//! Command-line front end: `embed`, `bench` and `vr-weights`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kernel_umap::optimize::Init;
use kernel_umap::pipeline::{self, GraphMode, InputFormat, RunConfig};
use kernel_umap::vr::BeliefMode;
use kernel_umap::{Error, KernelId};

#[derive(Parser)]
#[command(
    name = "kumap",
    version,
    about = "UMAP-style embedding with pluggable probability kernels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a dataset and write embedding.csv, run_meta.json and optionally embedding.svg.
    Embed(Common),
    /// Score a grid of kernels and seeds; writes scores.csv and scores.jsonl.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Comma-separated kernel names, or "all".
        #[arg(long, default_value = "all")]
        kernels: String,
        /// Comma-separated seeds.
        #[arg(long, required = true, value_delimiter = ',')]
        seeds: Vec<u64>,
    },
    /// Write the Vietoris-Rips fuzzy graph to vr_weights.csv without embedding.
    VrWeights(Common),
}

/// Flags shared by every subcommand. Unset flags fall back to the JSON
/// config, then to built-in defaults.
#[derive(Args)]
struct Common {
    /// Input dataset.
    input: Option<PathBuf>,
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<InputFormat>,
    /// idx label file.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// CSV label column (header name or 0-based index).
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long)]
    max_points: Option<usize>,
    #[arg(long)]
    subsample_seed: Option<u64>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<GraphMode>,
    #[arg(long)]
    kernel: Option<KernelId>,
    #[arg(short, long)]
    k: Option<usize>,
    #[arg(long)]
    vr_delta: Option<f64>,
    #[arg(long)]
    vr_max_dim: Option<usize>,
    #[arg(long)]
    vr_budget: Option<usize>,
    /// Use only forward directed probabilities in the simplex belief.
    #[arg(long)]
    vr_forward_only: bool,
    #[arg(long)]
    n_components: Option<usize>,
    #[arg(long)]
    n_epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    negative_sample_rate: Option<usize>,
    #[arg(long)]
    min_dist: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    init: Option<Init>,
    #[arg(long)]
    gradient_clip: Option<f64>,
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
    /// Also write embedding.svg.
    #[arg(long)]
    plot: bool,
    #[arg(long)]
    dbscan_eps: Option<f64>,
    #[arg(long)]
    dbscan_min_pts: Option<usize>,
}

fn parse_format(s: &str) -> Result<InputFormat, String> {
    match s {
        "csv" => Ok(InputFormat::Csv),
        "idx" => Ok(InputFormat::Idx),
        _ => Err(format!("unknown format {s:?} (expected csv or idx)")),
    }
}

fn parse_mode(s: &str) -> Result<GraphMode, String> {
    match s {
        "knn" => Ok(GraphMode::Knn),
        "vr" => Ok(GraphMode::Vr),
        _ => Err(format!("unknown mode {s:?} (expected knn or vr)")),
    }
}

impl Common {
    fn into_config(self) -> Result<RunConfig, Error> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag { c.$($field).+ = v; })*
            };
        }
        set! {
            input => input_path,
            format => format,
            subsample_seed => subsample_seed,
            mode => mode,
            kernel => kernel,
            k => k,
            vr_max_dim => vr.max_dim,
            vr_budget => vr.budget,
            n_components => optimizer.n_components,
            n_epochs => optimizer.n_epochs,
            learning_rate => optimizer.learning_rate,
            alpha => optimizer.alpha_repulsion,
            negative_sample_rate => optimizer.negative_sample_rate,
            min_dist => optimizer.min_dist,
            seed => optimizer.seed,
            init => optimizer.init,
            gradient_clip => optimizer.gradient_clip,
            output_dir => output_dir,
            dbscan_eps => dbscan.eps,
            dbscan_min_pts => dbscan.min_pts,
        }
        if self.labels.is_some() {
            c.idx_labels = self.labels;
        }
        if self.label_column.is_some() {
            c.label_column = self.label_column;
        }
        if self.max_points.is_some() {
            c.max_points = self.max_points;
        }
        if self.vr_delta.is_some() {
            c.vr.delta = self.vr_delta;
        }
        if self.vr_forward_only {
            c.vr.belief = BeliefMode::Forward;
        }
        c.plot |= self.plot;
        Ok(c)
    }
}

fn parse_kernels(list: &str) -> Result<Vec<KernelId>, Error> {
    if list == "all" {
        return Ok(KernelId::ALL.to_vec());
    }
    list.split(',').map(|s| s.trim().parse()).collect()
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Embed(common) => {
            let cfg = common.into_config()?;
            let out = pipeline::run_embed(&cfg)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "embedded {} points into {} dimensions; final loss {:.6}; output in {}",
                out.meta.n_points,
                out.embedding.dim(),
                out.meta.final_loss,
                cfg.output_dir.display()
            );
        }
        Command::Bench { common, kernels, seeds } => {
            let cfg = common.into_config()?;
            let kernels = parse_kernels(&kernels)?;
            let reports = pipeline::run_bench(&cfg, &kernels, &seeds)?;
            println!("{}", kernel_umap::eval::CSV_HEADER);
            for r in &reports {
                println!("{}", r.csv_row());
            }
        }
        Command::VrWeights(common) => {
            let cfg = common.into_config()?;
            let summary = pipeline::run_vr_weights(&cfg)?;
            println!(
                "{} weighted edges; simplices by dimension {:?}; output in {}",
                summary.graph.len(),
                summary.simplices_by_dim,
                cfg.output_dir.join("vr_weights.csv").display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
