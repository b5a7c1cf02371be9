use std::collections::{BTreeMap, BTreeSet};
use std::fs;

use altscan::corpus::{
    build_training_set, ingest, temporal_sample, CorpusManifest, Document, PositiveSet,
    SampleOptions,
};

use crate::config::PipelineConfig;
use crate::error::{at_path, CliError, CliResult};
use crate::io::write_jsonl;

fn drop_rare_languages(docs: &mut Vec<Document>, min_docs: usize, warnings: &mut Vec<String>) {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs.iter() {
        if let Some(label) = &doc.language_label {
            *counts.entry(label).or_insert(0) += 1;
        }
    }
    let dropped: BTreeSet<String> = counts
        .iter()
        .filter(|(_, &n)| n < min_docs)
        .map(|(label, _)| (*label).to_string())
        .collect();
    if dropped.is_empty() {
        return;
    }
    docs.retain(|doc| {
        doc.language_label
            .as_ref()
            .is_none_or(|label| !dropped.contains(label))
    });
    let names: Vec<&str> = dropped.iter().map(String::as_str).collect();
    warnings.push(format!(
        "dropped languages with fewer than {min_docs} documents: {}",
        names.join(", ")
    ));
}

fn load_positive_set(config: &PipelineConfig) -> CliResult<Option<PositiveSet>> {
    match (&config.positive_label, &config.positive_ids) {
        (Some(label), Some(_)) => {
            let path = config.require(&config.positive_ids, "positive-ids")?;
            let text = at_path(fs::read_to_string(&path), &path)?;
            let ids = text
                .lines()
                .map(str::trim)
                .filter(|line| !line.is_empty())
                .map(str::to_string);
            Ok(Some(PositiveSet::new(label.clone(), ids)))
        }
        (Some(_), None) => Err(CliError::Usage(
            "--positive-label requires --positive-ids".into(),
        )),
        (None, Some(_)) => Err(CliError::Usage(
            "--positive-ids requires --positive-label".into(),
        )),
        (None, None) => Ok(None),
    }
}

pub fn cmd_prepare(config: &PipelineConfig) -> CliResult<()> {
    let manifest_path = config.require(&config.manifest, "manifest")?;
    let segments_path = config.require(&config.segments, "segments")?;

    let manifest = at_path(CorpusManifest::from_path(&manifest_path), &manifest_path)?;
    let outcome = ingest(&manifest, &config.resolve_base_dir(&manifest_path))?;
    let mut docs = outcome.documents;
    let mut warnings = outcome.warnings;

    if let Some(min_year) = config.min_year {
        let before = docs.len();
        docs.retain(|doc| doc.year.is_none_or(|y| y >= min_year));
        if docs.len() < before {
            warnings.push(format!(
                "dropped {} documents dated before {min_year}",
                before - docs.len()
            ));
        }
    }
    if config.min_lang_docs > 1 {
        drop_rare_languages(&mut docs, config.min_lang_docs, &mut warnings);
    }
    if let Some(bucket_count) = config.sample_buckets {
        let sampled = temporal_sample(
            &docs,
            &SampleOptions {
                bucket_count,
                extra_count: config.sample_extra,
                rng_seed: config.seed,
            },
        );
        docs = sampled.documents;
        warnings.extend(sampled.warnings);
    }

    let positive = load_positive_set(config)?;
    let set = build_training_set(&docs, positive.as_ref());
    warnings.extend(set.warnings);
    write_jsonl(&segments_path, &set.segments)?;

    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    println!(
        "prepared {} segments from {} documents into {}",
        set.segments.len(),
        docs.len(),
        segments_path.display()
    );
    Ok(())
}
