use std::fs;

use altscan::corpus::{generate_synthetic_corpus, ManifestEntry, PatternTag, SynthConfig};
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{at_path, CliResult};
use crate::io::{create_dir, write_jsonl, write_text};

/// Ground-truth line written next to the manifest, one per document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruthRecord {
    pub doc_id: String,
    #[serde(flatten)]
    pub tag: PatternTag,
}

pub fn cmd_synth(config: &PipelineConfig) -> CliResult<()> {
    let spec_path = config.require(&config.synth_spec, "spec")?;
    let out_dir = config.require(&config.out_dir, "out-dir")?;

    let spec_text = at_path(fs::read_to_string(&spec_path), &spec_path)?;
    let spec = SynthConfig::from_json(&spec_text)?;
    let corpus = generate_synthetic_corpus(&spec, config.seed)?;

    create_dir(&out_dir.join("docs"))?;
    let mut entries = Vec::with_capacity(corpus.len());
    let mut truth = Vec::with_capacity(corpus.len());
    for (doc, tag) in &corpus {
        let rel = format!("docs/{}.txt", doc.id);
        write_text(&out_dir.join(&rel), &doc.text)?;
        entries.push(ManifestEntry {
            id: doc.id.clone(),
            path: rel,
            language: doc.language_label.clone(),
            year: doc.year,
        });
        truth.push(TruthRecord {
            doc_id: doc.id.clone(),
            tag: tag.clone(),
        });
    }
    write_jsonl(&out_dir.join("manifest.jsonl"), &entries)?;
    write_jsonl(&out_dir.join("truth.jsonl"), &truth)?;
    config.write_resolved(&out_dir)?;

    println!("generated {} documents in {}", corpus.len(), out_dir.display());
    Ok(())
}
