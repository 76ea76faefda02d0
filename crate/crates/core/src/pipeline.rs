//! End-to-end runs: load → weight → embed → write artifacts, plus the
//! kernel × seed benchmark and the VR weight dump.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{build_knn, Dataset, Embedding, FuzzyGraph};
use crate::error::{Error, Result};
use crate::eval::{kl_divergence, score_embedding, DbscanParams, EdgeSet, ScoreReport, CSV_HEADER};
use crate::fuzzy::{build_fuzzy_graph_with_scale, LocalScale};
use crate::io;
use crate::kernel::KernelId;
use crate::optimize::{loss, optimize, OptimizerConfig};
use crate::vr::{build_vr_fuzzy_graph, BeliefMode, VrParams, DEFAULT_BUDGET, DEFAULT_MAX_DIM};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    #[default]
    Csv,
    Idx,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    #[default]
    Knn,
    Vr,
}

/// Vietoris–Rips settings; `delta` is required in VR mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VrConfig {
    pub delta: Option<f64>,
    pub max_dim: usize,
    pub budget: usize,
    pub belief: BeliefMode,
}

impl Default for VrConfig {
    fn default() -> Self {
        Self {
            delta: None,
            max_dim: DEFAULT_MAX_DIM,
            budget: DEFAULT_BUDGET,
            belief: BeliefMode::default(),
        }
    }
}

/// Everything needed to reproduce a run. Serialised verbatim into
/// `run_meta.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub format: InputFormat,
    /// Label file for idx inputs.
    pub idx_labels: Option<PathBuf>,
    /// Header name or 0-based index of the CSV label column.
    pub label_column: Option<String>,
    /// Uniform subsample size; larger inputs are thinned before embedding.
    pub max_points: Option<usize>,
    pub subsample_seed: u64,
    pub mode: GraphMode,
    pub kernel: KernelId,
    pub k: usize,
    pub vr: VrConfig,
    pub optimizer: OptimizerConfig,
    pub output_dir: PathBuf,
    pub plot: bool,
    pub dbscan: DbscanParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input_path: PathBuf::new(),
            format: InputFormat::default(),
            idx_labels: None,
            label_column: None,
            max_points: None,
            subsample_seed: 0,
            mode: GraphMode::default(),
            kernel: KernelId::Membership,
            k: 15,
            vr: VrConfig::default(),
            optimizer: OptimizerConfig::default(),
            output_dir: PathBuf::from("out"),
            plot: false,
            dbscan: DbscanParams::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::usage(format!("{}: {e}", path.display())))
    }

    /// Checks cross-field requirements without touching the filesystem.
    pub fn validate(&self) -> Result<()> {
        if self.input_path.as_os_str().is_empty() {
            return Err(Error::usage("no input path given"));
        }
        if self.k == 0 {
            return Err(Error::usage("k must be >= 1"));
        }
        if self.mode == GraphMode::Vr {
            match self.vr.delta {
                None => return Err(Error::usage("vr mode requires a delta (--vr-delta)")),
                Some(d) if !(d > 0.0 && d.is_finite()) => {
                    return Err(Error::usage(format!("vr delta must be positive, got {d}")))
                }
                _ => {}
            }
            if self.vr.max_dim == 0 {
                return Err(Error::usage("vr max_dim must be >= 1"));
            }
        }
        if self.max_points == Some(0) {
            return Err(Error::usage("max_points must be >= 1"));
        }
        if !(self.dbscan.eps > 0.0) || self.dbscan.min_pts == 0 {
            return Err(Error::usage("dbscan needs eps > 0 and min_pts >= 1"));
        }
        self.optimizer.validate()
    }

    fn vr_params(&self) -> Result<VrParams> {
        let delta = self
            .vr
            .delta
            .ok_or_else(|| Error::usage("vr mode requires a delta (--vr-delta)"))?;
        Ok(VrParams {
            delta,
            max_dim: self.vr.max_dim,
            budget: self.vr.budget,
            mode: self.vr.belief,
        })
    }
}

/// Reads the configured input, applying the subsample cap.
pub fn load_dataset(cfg: &RunConfig) -> Result<Dataset> {
    let data = match cfg.format {
        InputFormat::Csv => io::load_csv(&cfg.input_path, cfg.label_column.as_deref())?,
        InputFormat::Idx => io::load_idx(&cfg.input_path, cfg.idx_labels.as_deref())?,
    };
    match cfg.max_points {
        Some(m) => io::subsample(&data, m, cfg.subsample_seed),
        None => Ok(data),
    }
}

/// High-dimensional weighting together with the local scales behind it.
#[derive(Debug, Clone)]
pub struct Weighting {
    pub graph: FuzzyGraph,
    pub scale: LocalScale,
}

pub fn build_weighting(data: &Dataset, cfg: &RunConfig) -> Result<Weighting> {
    match cfg.mode {
        GraphMode::Knn => {
            let knn = build_knn(data, cfg.k)?;
            let (graph, scale) = build_fuzzy_graph_with_scale(&knn, cfg.kernel)?;
            Ok(Weighting { graph, scale })
        }
        GraphMode::Vr => {
            let vr = build_vr_fuzzy_graph(data, cfg.k, cfg.kernel, &cfg.vr_params()?)?;
            Ok(Weighting {
                graph: vr.graph,
                scale: vr.scale,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub config: RunConfig,
    pub n_points: usize,
    pub n_edges: usize,
    pub flagged_points: usize,
    pub max_normalization_residual: f64,
    pub mean_normalization_residual: f64,
    pub curve_a: f64,
    pub curve_b: f64,
    pub final_loss: f64,
    pub final_kl_divergence: f64,
    pub non_finite_values: usize,
}

#[derive(Debug, Clone)]
pub struct EmbedOutcome {
    pub embedding: Embedding,
    pub weighting: Weighting,
    pub meta: RunMeta,
    pub warnings: Vec<String>,
}

/// Runs the pipeline in memory on an already loaded dataset.
pub fn embed_dataset(data: &Dataset, cfg: &RunConfig) -> Result<EmbedOutcome> {
    cfg.validate()?;
    let weighting = build_weighting(data, cfg)?;
    let embedding = optimize(&weighting.graph, data, &cfg.optimizer)?;
    let scale = &weighting.scale;
    let unflagged: Vec<f64> = (0..scale.len())
        .filter(|&i| !scale.flagged[i])
        .map(|i| scale.residual(i))
        .collect();
    let mean_res = if unflagged.is_empty() {
        0.0
    } else {
        unflagged.iter().sum::<f64>() / unflagged.len() as f64
    };
    let meta = RunMeta {
        config: cfg.clone(),
        n_points: data.n_points(),
        n_edges: weighting.graph.len(),
        flagged_points: scale.n_flagged(),
        max_normalization_residual: scale.max_unflagged_residual(),
        mean_normalization_residual: mean_res,
        curve_a: embedding.curve().a,
        curve_b: embedding.curve().b,
        final_loss: loss(&weighting.graph, &embedding, cfg.optimizer.alpha_repulsion)?,
        final_kl_divergence: kl_divergence(&weighting.graph, &embedding, EdgeSet::AllPairs)?,
        non_finite_values: embedding.coords().iter().filter(|v| !v.is_finite()).count(),
    };
    let mut warnings = Vec::new();
    if scale.n_flagged() > 0 {
        warnings.push(format!(
            "{} of {} points could not meet the normalization target and were flagged",
            scale.n_flagged(),
            data.n_points()
        ));
    }
    Ok(EmbedOutcome {
        embedding,
        weighting,
        meta,
        warnings,
    })
}

fn prepare_output_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn ids(data: &Dataset) -> Vec<String> {
    (0..data.n_points()).map(|i| data.id(i)).collect()
}

/// `embed`: writes `embedding.csv`, `run_meta.json` and, when `plot` is set,
/// `embedding.svg` into `output_dir`.
pub fn run_embed(cfg: &RunConfig) -> Result<EmbedOutcome> {
    cfg.validate()?;
    let data = load_dataset(cfg)?;
    prepare_output_dir(&cfg.output_dir)?;
    let mut out = embed_dataset(&data, cfg)?;
    let dir = &cfg.output_dir;
    io::write_embedding_csv(dir.join("embedding.csv"), &out.embedding, &ids(&data))?;
    write_file(&dir.join("run_meta.json"), serde_json::to_string_pretty(&out.meta)?)?;
    if cfg.plot {
        if out.embedding.dim() > 2 {
            out.warnings.push(format!(
                "embedding has {} components; the plot shows the first two",
                out.embedding.dim()
            ));
        }
        io::write_embedding_svg(dir.join("embedding.svg"), &out.embedding, data.labels())?;
    }
    Ok(out)
}

/// Scores every (kernel, seed) pair on a labelled dataset. Rows come back
/// kernel-major in the order given, independent of thread scheduling.
pub fn bench_dataset(data: &Dataset, cfg: &RunConfig, kernels: &[KernelId], seeds: &[u64]) -> Result<Vec<ScoreReport>> {
    cfg.validate()?;
    let labels = data
        .labels()
        .ok_or_else(|| Error::usage("bench needs a labelled dataset (set label_column or idx_labels)"))?;
    if kernels.is_empty() || seeds.is_empty() {
        return Err(Error::usage("bench needs at least one kernel and one seed"));
    }
    let graphs = kernels
        .par_iter()
        .map(|&kernel| {
            let kcfg = RunConfig { kernel, ..cfg.clone() };
            build_weighting(data, &kcfg).map(|w| w.graph)
        })
        .collect::<Result<Vec<_>>>()?;
    let runs: Vec<(usize, u64)> = (0..kernels.len())
        .flat_map(|k| seeds.iter().map(move |&s| (k, s)))
        .collect();
    runs.par_iter()
        .map(|&(ki, seed)| {
            let opt = OptimizerConfig { seed, ..cfg.optimizer };
            let emb = optimize(&graphs[ki], data, &opt)?;
            score_embedding(&emb, labels, cfg.dbscan, kernels[ki], seed)
        })
        .collect()
}

/// `bench`: writes `scores.csv` and `scores.jsonl` into `output_dir`.
pub fn run_bench(cfg: &RunConfig, kernels: &[KernelId], seeds: &[u64]) -> Result<Vec<ScoreReport>> {
    cfg.validate()?;
    let data = load_dataset(cfg)?;
    if data.labels().is_none() {
        return Err(Error::usage(
            "bench needs a labelled dataset (set label_column or idx_labels)",
        ));
    }
    prepare_output_dir(&cfg.output_dir)?;
    let reports = bench_dataset(&data, cfg, kernels, seeds)?;
    let mut csv = format!("{CSV_HEADER}\n");
    let mut jsonl = String::new();
    for r in &reports {
        csv.push_str(&r.csv_row());
        csv.push('\n');
        jsonl.push_str(&serde_json::to_string(r)?);
        jsonl.push('\n');
    }
    write_file(&cfg.output_dir.join("scores.csv"), csv)?;
    write_file(&cfg.output_dir.join("scores.jsonl"), jsonl)?;
    Ok(reports)
}

/// Summary of a `vr-weights` run.
#[derive(Debug, Clone, PartialEq)]
pub struct VrWeightsSummary {
    pub graph: FuzzyGraph,
    /// Simplex counts indexed by dimension.
    pub simplices_by_dim: Vec<usize>,
}

/// `vr-weights`: writes the aggregated VR fuzzy graph to `vr_weights.csv`
/// without embedding.
pub fn run_vr_weights(cfg: &RunConfig) -> Result<VrWeightsSummary> {
    let cfg = RunConfig {
        mode: GraphMode::Vr,
        ..cfg.clone()
    };
    cfg.validate()?;
    let params = cfg.vr_params()?;
    let data = load_dataset(&cfg)?;
    prepare_output_dir(&cfg.output_dir)?;
    let vr = build_vr_fuzzy_graph(&data, cfg.k, cfg.kernel, &params)?;
    io::write_fuzzy_graph_csv(cfg.output_dir.join("vr_weights.csv"), &vr.graph)?;
    let simplices_by_dim = (0..=cfg.vr.max_dim).map(|d| vr.complex.count_of_dim(d)).collect();
    Ok(VrWeightsSummary {
        graph: vr.graph,
        simplices_by_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_json() {
        let cfg = RunConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), cfg);
        let partial: RunConfig = serde_json::from_str(r#"{"kernel":"morse","optimizer":{"seed":7}}"#).unwrap();
        assert_eq!(partial.kernel, KernelId::Morse);
        assert_eq!(partial.optimizer.seed, 7);
        assert_eq!(partial.optimizer.n_epochs, 500);
        assert!(serde_json::from_str::<RunConfig>(r#"{"kernel":"cosine"}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"kernal":"morse"}"#).is_err());
    }

    #[test]
    fn vr_mode_needs_delta() {
        let cfg = RunConfig {
            input_path: "does-not-exist.csv".into(),
            mode: GraphMode::Vr,
            ..RunConfig::default()
        };
        let err = run_embed(&cfg).unwrap_err();
        assert!(matches!(err, Error::Usage(_)), "{err}");
        let err = run_vr_weights(&cfg).unwrap_err();
        assert!(matches!(err, Error::Usage(_)), "{err}");
    }
}
