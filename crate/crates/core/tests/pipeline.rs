mod common;

use std::fs;

use common::*;
use kernel_umap::eval::{score_embedding, CSV_HEADER};
use kernel_umap::io::{self, read_embedding_csv};
use kernel_umap::optimize::OptimizerConfig;
use kernel_umap::pipeline::{
    bench_dataset, embed_dataset, run_bench, run_embed, run_vr_weights, GraphMode, InputFormat, RunConfig, VrConfig,
};
use kernel_umap::{Error, KernelId};

fn iris_cfg(out: &std::path::Path) -> RunConfig {
    RunConfig {
        input_path: iris_path(),
        label_column: Some("species".into()),
        output_dir: out.to_path_buf(),
        ..RunConfig::default()
    }
}

#[test]
fn iris_loads_with_three_classes() {
    let d = iris();
    assert_eq!((d.n_points(), d.dim()), (150, 4));
    let mut classes = d.labels().unwrap().to_vec();
    classes.sort_unstable();
    classes.dedup();
    assert_eq!(classes, vec![0, 1, 2]);
    assert_eq!(d.point(0), &[5.1, 3.5, 1.4, 0.2]);
}

#[test]
fn embed_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        plot: true,
        ..iris_cfg(dir.path())
    };
    let out = run_embed(&cfg).unwrap();
    for f in ["embedding.csv", "run_meta.json", "embedding.svg"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["n_points"], 150);
    assert_eq!(meta["non_finite_values"], 0);
    assert_eq!(meta["flagged_points"], 0);
    assert!(meta["max_normalization_residual"].as_f64().unwrap() <= 1e-5);
    assert!(meta["final_loss"].as_f64().unwrap().is_finite());
    // defaulted values are echoed too
    assert_eq!(meta["config"]["optimizer"]["n_epochs"], 500);
    assert_eq!(meta["config"]["vr"]["budget"], 10_000_000);
    let echoed: RunConfig = serde_json::from_value(meta["config"].clone()).unwrap();
    assert_eq!(echoed, cfg);

    let (ids, coords, dim) = read_embedding_csv(dir.path().join("embedding.csv")).unwrap();
    assert_eq!(dim, 2);
    assert_eq!(ids.len(), 150);
    assert_eq!(ids[0], "0");
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&coords), bits(out.embedding.coords()));

    let svg = fs::read_to_string(dir.path().join("embedding.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("circle")).count(), 150);
}

#[test]
fn plotting_three_components_warns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        plot: true,
        optimizer: OptimizerConfig {
            n_components: 3,
            n_epochs: 50,
            ..OptimizerConfig::default()
        },
        ..iris_cfg(dir.path())
    };
    let out = run_embed(&cfg).unwrap();
    assert!(out.warnings.iter().any(|w| w.contains("first two")));
    let svg = fs::read_to_string(dir.path().join("embedding.svg")).unwrap();
    assert_eq!(
        roxmltree::Document::parse(&svg)
            .unwrap()
            .descendants()
            .filter(|n| n.has_tag_name("circle"))
            .count(),
        150
    );
}

#[test]
fn unwritable_output_dir_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = iris_cfg(&blocker.join("out"));
    let err = run_embed(&cfg).unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err}");
    assert_ne!(err.exit_code(), 0);
}

#[test]
fn vr_without_delta_fails_before_loading() {
    let cfg = RunConfig {
        input_path: "/nonexistent/input.csv".into(),
        mode: GraphMode::Vr,
        ..RunConfig::default()
    };
    assert!(matches!(run_embed(&cfg), Err(Error::Usage(_))));
}

#[test]
fn bench_all_kernels_five_seeds_gives_thirty_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = iris_cfg(dir.path());
    let reports = run_bench(&cfg, &KernelId::ALL, &[1, 2, 3, 4, 5]).unwrap();
    assert_eq!(reports.len(), 30);
    let csv = fs::read_to_string(dir.path().join("scores.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 31);
    assert!(lines[1].starts_with("membership,") && lines[1].ends_with(",1"));
    assert!(lines[30].starts_with("constant,") && lines[30].ends_with(",5"));
    let jsonl = fs::read_to_string(dir.path().join("scores.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 30);
    for r in &reports {
        assert!((-1.0..=1.0).contains(&r.ars) && r.amis <= 1.0 && (-1.0..=1.0).contains(&r.silhouette));
    }
}

#[test]
fn bench_of_one_run_equals_embed_plus_scoring() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        kernel: KernelId::Quadratic,
        ..iris_cfg(dir.path())
    };
    let data = iris();
    let bench = bench_dataset(&data, &cfg, &[KernelId::Quadratic], &[42]).unwrap();
    let out = embed_dataset(&data, &cfg).unwrap();
    let manual = score_embedding(
        &out.embedding,
        data.labels().unwrap(),
        cfg.dbscan,
        KernelId::Quadratic,
        42,
    )
    .unwrap();
    assert_eq!(bench, vec![manual]);
}

#[test]
fn bench_requires_labels() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        label_column: None,
        ..iris_cfg(dir.path())
    };
    // without a label column the species strings are not numeric
    assert!(matches!(
        run_bench(&cfg, &[KernelId::Membership], &[1]),
        Err(Error::Data(_))
    ));

    let plain = dir.path().join("plain.csv");
    fs::write(&plain, "1,2\n3,4\n5,7\n6,1\n").unwrap();
    let cfg = RunConfig {
        input_path: plain,
        label_column: None,
        k: 2,
        ..iris_cfg(dir.path())
    };
    assert!(matches!(
        run_bench(&cfg, &[KernelId::Membership], &[1]),
        Err(Error::Usage(_))
    ));
}

#[test]
fn bench_on_idx_input_subsamples() {
    let dir = tempfile::tempdir().unwrap();
    let (n, side) = (90usize, 4usize);
    let mut pixels = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let class = (i % 3) as u8;
        labels.push(class);
        for p in 0..side * side {
            let base = if p % 3 == class as usize { 200 } else { 20 };
            pixels.push(base + ((i * 7 + p * 13) % 30) as u8);
        }
    }
    let images = dir.path().join("images.idx");
    let label_file = dir.path().join("labels.idx");
    io::write_idx_u8(&images, &[n as u32, side as u32, side as u32], &pixels).unwrap();
    io::write_idx_u8(&label_file, &[n as u32], &labels).unwrap();

    let cfg = RunConfig {
        input_path: images,
        format: InputFormat::Idx,
        idx_labels: Some(label_file),
        max_points: Some(60),
        subsample_seed: 3,
        k: 10,
        output_dir: dir.path().join("out"),
        optimizer: OptimizerConfig {
            n_epochs: 100,
            ..OptimizerConfig::default()
        },
        ..RunConfig::default()
    };
    let data = kernel_umap::pipeline::load_dataset(&cfg).unwrap();
    assert_eq!((data.n_points(), data.dim()), (60, 16));
    let reports = run_bench(&cfg, &[KernelId::Gaussian], &[1, 2]).unwrap();
    assert_eq!(reports.len(), 2);
}

#[test]
fn vr_mode_embeds_and_dumps_weights() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        mode: GraphMode::Vr,
        vr: VrConfig {
            delta: Some(0.6),
            ..VrConfig::default()
        },
        optimizer: OptimizerConfig {
            n_epochs: 100,
            ..OptimizerConfig::default()
        },
        ..iris_cfg(dir.path())
    };
    let out = run_embed(&cfg).unwrap();
    assert_eq!(out.embedding.n_points(), 150);
    let summary = run_vr_weights(&cfg).unwrap();
    assert_eq!(summary.simplices_by_dim[0], 0);
    assert_eq!(summary.simplices_by_dim[1], summary.graph.len());
    assert!(summary.simplices_by_dim[2] > 0);
    let g = io::read_fuzzy_graph_csv(dir.path().join("vr_weights.csv"), 150).unwrap();
    assert_eq!(g, summary.graph);
    assert!(g.edges().iter().all(|e| (0.0..=1.0).contains(&e.weight)));
}
