//! UMAP-style dimension reduction with interchangeable probability kernels.
//!
//! The pipeline has four stages:
//!
//! 1. [`data::build_knn`] connects each point to its `k` nearest neighbours.
//! 2. [`fuzzy`] rescales every neighbourhood so the kernel weights sum to
//!    `log₂ k`, then merges the two directed beliefs of each edge with the
//!    probabilistic OR. [`vr`] offers an alternative weighting built from the
//!    Vietoris–Rips clique complex at a scale δ.
//! 3. [`optimize`] lays the weighted graph out in a low dimension by
//!    minimising the fuzzy cross-entropy with negative-sampling SGD.
//! 4. [`eval`] measures the result: KL divergence, DBSCAN clusters, ARS,
//!    AMIS and silhouette.
//!
//! [`pipeline`] strings these together and writes the usual artifacts;
//! [`io`] holds the loaders and writers. The crate's `examples/` directory
//! has one runnable program per capability.
//!
//! ```no_run
//! use kernel_umap::{io, pipeline::{embed_dataset, RunConfig}, KernelId};
//!
//! let data = io::load_csv("iris.csv", Some("species"))?;
//! let cfg = RunConfig { input_path: "iris.csv".into(), kernel: KernelId::Gaussian, ..RunConfig::default() };
//! let out = embed_dataset(&data, &cfg)?;
//! println!("final loss {}", out.meta.final_loss);
//! # Ok::<(), kernel_umap::Error>(())
//! ```

// NaN-rejecting checks are written as negated comparisons on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod eval;
pub mod fuzzy;
pub mod io;
pub mod kernel;
pub mod optimize;
pub mod pipeline;
pub mod vr;

pub use data::{build_knn, Dataset, Edge, Embedding, Euclidean, FuzzyGraph, KnnGraph, Metric};
pub use error::{Error, Result};
pub use fuzzy::{build_fuzzy_graph, solve_sigma, symmetrize, LocalScale};
pub use kernel::{kernel_eval, KernelId};
pub use optimize::{fit_curve, low_dim_weight, optimize, CurveParams, OptimizerConfig};
