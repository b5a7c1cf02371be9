use std::path::Path;

use altscan::clustering::{elbow_scan, kmeans_fit, KMeansParams};
use altscan::corpus::{ingest, CorpusManifest};
use altscan::langid::{AnyModel, Predictor};
use altscan::spectral::{feature_vector_tapered, SpectrumFeature};
use altscan::windowing::{
    extract_signal, infer_grid, window_document, window_document_by_script, LanguageSignal,
    WindowGrid,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::PipelineConfig;
use crate::error::{at_path, CliError, CliResult};
use crate::io::{create_dir, read_json, read_jsonl, write_json_pretty, write_jsonl, Csv};

const STAGES: [&str; 4] = ["grids", "signals", "features", "cluster"];

/// A document a stage passed over instead of aborting on.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SkippedDoc {
    doc_id: String,
    windows: usize,
}

/// Sidecar written by the signals and features stages so a later stage can
/// assemble the run report without their inputs.
#[derive(Debug, Default, Serialize, Deserialize)]
struct StageMeta {
    items: usize,
    #[serde(default)]
    warnings: Vec<String>,
    #[serde(default)]
    skipped: Vec<SkippedDoc>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct GridsMeta {
    model_family: String,
    labels: Vec<String>,
    documents: usize,
    windows: usize,
    #[serde(default)]
    warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
struct RunReport {
    documents: usize,
    windows: usize,
    signals: usize,
    features: usize,
    model_family: String,
    labels: Vec<String>,
    selected_k: usize,
    cluster_sizes: Vec<usize>,
    skipped: Vec<SkippedDoc>,
    warnings: Vec<String>,
}

fn read_meta<T: Default + serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    if path.exists() {
        read_json(path)
    } else {
        Ok(T::default())
    }
}

pub fn cmd_analyze(config: &PipelineConfig, only: Option<&str>) -> CliResult<()> {
    let out_dir = config.require(&config.out_dir, "out-dir")?;
    create_dir(&out_dir)?;
    let stages: Vec<&str> = match only {
        None => STAGES.to_vec(),
        Some(stage) if STAGES.contains(&stage) => vec![stage],
        Some(stage) => {
            return Err(CliError::Usage(format!(
                "unknown stage {stage:?}; expected one of grids, signals, features, cluster"
            )))
        }
    };
    for stage in stages {
        match stage {
            "grids" => stage_grids(config, &out_dir)?,
            "signals" => stage_signals(&out_dir)?,
            "features" => stage_features(config, &out_dir)?,
            "cluster" => stage_cluster(config, &out_dir)?,
            _ => unreachable!(),
        }
    }
    config.write_resolved(&out_dir)?;
    Ok(())
}

fn stage_grids(config: &PipelineConfig, out_dir: &Path) -> CliResult<()> {
    let manifest_path = config.require(&config.manifest, "manifest")?;
    let model_path = config.require(&config.model_file, "model-file")?;
    let model = at_path(AnyModel::load(&model_path), &model_path)?;
    let manifest = at_path(CorpusManifest::from_path(&manifest_path), &manifest_path)?;
    let outcome = ingest(&manifest, &config.resolve_base_dir(&manifest_path))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    let grids: Vec<WindowGrid> = pool.install(|| {
        use rayon::prelude::*;
        outcome
            .documents
            .par_iter()
            .map(|doc| {
                let windows = if config.script_windows {
                    window_document_by_script(doc, config.window_size)
                } else {
                    window_document(doc, config.window_size)
                };
                let mut grid = infer_grid(&model, &windows, &doc.text, config.window_size);
                grid.doc_id = doc.id.clone();
                grid
            })
            .collect()
    });
    let window_total: usize = grids.iter().map(|g| g.windows.len()).sum();

    write_jsonl(&out_dir.join("grids.jsonl"), &grids)?;
    write_json_pretty(
        &out_dir.join("grids.meta.json"),
        &GridsMeta {
            model_family: model.family().to_string(),
            labels: model.label_set().labels().to_vec(),
            documents: grids.len(),
            windows: window_total,
            warnings: outcome.warnings.clone(),
        },
    )?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    println!("grids: {} documents, {window_total} windows", grids.len());
    Ok(())
}

fn stage_signals(out_dir: &Path) -> CliResult<()> {
    let grids: Vec<WindowGrid> = read_jsonl(&out_dir.join("grids.jsonl"))?;
    let mut signals = Vec::new();
    let mut meta = StageMeta::default();
    for grid in &grids {
        if grid.windows.is_empty() {
            meta.warnings
                .push(format!("doc {} has no windows; skipped", grid.doc_id));
            meta.skipped.push(SkippedDoc {
                doc_id: grid.doc_id.clone(),
                windows: 0,
            });
            continue;
        }
        let signal = extract_signal(grid)
            .map_err(|e| CliError::Data(format!("signals stage: doc {}: {e}", grid.doc_id)))?;
        signals.push(signal);
    }
    meta.items = signals.len();

    write_jsonl(&out_dir.join("signals.jsonl"), &signals)?;
    write_json_pretty(&out_dir.join("signals.meta.json"), &meta)?;
    for warning in &meta.warnings {
        eprintln!("warning: {warning}");
    }
    println!("signals: {} of {} documents", signals.len(), grids.len());
    Ok(())
}

fn stage_features(config: &PipelineConfig, out_dir: &Path) -> CliResult<()> {
    let signals: Vec<LanguageSignal> = read_jsonl(&out_dir.join("signals.jsonl"))?;
    let mut features = Vec::new();
    let mut meta = StageMeta::default();
    for signal in &signals {
        match feature_vector_tapered(&signal.values, config.bin_count, config.taper()) {
            Ok(bins) => features.push(SpectrumFeature {
                doc_id: signal.doc_id.clone(),
                bins,
            }),
            Err(altscan::Error::SignalTooShort(n)) => {
                meta.warnings.push(format!(
                    "doc {}: {n} windows is too short for a spectrum; skipped",
                    signal.doc_id
                ));
                meta.skipped.push(SkippedDoc {
                    doc_id: signal.doc_id.clone(),
                    windows: n,
                });
            }
            Err(e @ altscan::Error::BinCountTooSmall(_)) => return Err(e.into()),
            Err(e) => {
                return Err(CliError::Data(format!(
                    "features stage: doc {}: {e}",
                    signal.doc_id
                )))
            }
        }
    }
    meta.items = features.len();

    write_jsonl(&out_dir.join("features.jsonl"), &features)?;
    write_json_pretty(&out_dir.join("features.meta.json"), &meta)?;
    for warning in &meta.warnings {
        eprintln!("warning: {warning}");
    }
    println!("features: {} of {} signals", features.len(), signals.len());
    Ok(())
}

fn stage_cluster(config: &PipelineConfig, out_dir: &Path) -> CliResult<()> {
    let features: Vec<SpectrumFeature> = read_jsonl(&out_dir.join("features.jsonl"))?;
    let params = KMeansParams {
        max_iter: config.max_iter,
        tol: config.tol,
        restarts: config.restarts,
    };

    let selected_k = match config.k {
        Some(k) => k,
        None => {
            let report = elbow_scan(
                &features,
                config.k_min,
                config.k_max,
                config.seed,
                config.restarts,
            )?;
            let mut csv = Csv::new("k,inertia,second_difference");
            let diffs = report.second_differences();
            for (i, (&k, &inertia)) in report.k_values.iter().zip(&report.inertias).enumerate() {
                csv.row(&[
                    k.to_string(),
                    inertia.to_string(),
                    diffs[i].map(|d| d.to_string()).unwrap_or_default(),
                ]);
            }
            csv.save(&out_dir.join("elbow.csv"))?;
            report.selected_k
        }
    };
    write_json_pretty(&out_dir.join("elbow.json"), &json!({ "selected_k": selected_k }))?;

    let (model, assignments) = kmeans_fit(&features, selected_k, config.seed, &params)?;
    write_jsonl(&out_dir.join("clusters.jsonl"), &assignments)?;

    let mut cluster_sizes = vec![0usize; model.k];
    for a in &assignments {
        cluster_sizes[a.cluster] += 1;
    }
    if cluster_sizes.iter().sum::<usize>() != features.len() {
        return Err(CliError::Internal(
            "cluster sizes do not sum to the feature count".into(),
        ));
    }

    let grids_meta: GridsMeta = read_meta(&out_dir.join("grids.meta.json"))?;
    let signals_meta: StageMeta = read_meta(&out_dir.join("signals.meta.json"))?;
    let features_meta: StageMeta = read_meta(&out_dir.join("features.meta.json"))?;
    let mut skipped = signals_meta.skipped;
    skipped.extend(features_meta.skipped);
    let mut warnings = grids_meta.warnings;
    warnings.extend(signals_meta.warnings);
    warnings.extend(features_meta.warnings);
    let report = RunReport {
        documents: grids_meta.documents,
        windows: grids_meta.windows,
        signals: signals_meta.items,
        features: features.len(),
        model_family: grids_meta.model_family,
        labels: grids_meta.labels,
        selected_k,
        cluster_sizes: cluster_sizes.clone(),
        skipped,
        warnings,
    };
    write_json_pretty(&out_dir.join("report.json"), &report)?;

    let sizes: Vec<String> = cluster_sizes.iter().map(|n| n.to_string()).collect();
    println!(
        "clusters: k = {selected_k}, sizes [{}] over {} documents",
        sizes.join(", "),
        features.len()
    );
    Ok(())
}
