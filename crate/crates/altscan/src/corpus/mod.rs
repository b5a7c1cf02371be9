//! Document ingest, Unicode script segmentation, training-set construction,
//! and synthetic corpus generation.

mod sample;
mod script;
mod synth;

pub use sample::{
    build_training_set, temporal_sample, PositiveSet, SampleOptions, SampleOutcome, TrainingSet,
};
pub use script::segment_by_script;
pub use synth::{
    generate_synthetic_corpus, PatternKind, PatternTag, SynthConfig, SynthDocSpec, SynthLanguage,
};

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single text with its catalog metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    /// ISO-639 code as recorded in the source catalog, when known.
    pub language_label: Option<String>,
    /// Publication year (CE), when known.
    pub year: Option<i32>,
    /// File path the text was read from, or "synthetic".
    pub source: String,
}

/// A maximal run of text whose code points share one Unicode script.
///
/// Offsets are byte offsets into the UTF-8 encoding of the source text and
/// always fall on code-point boundaries. The spans of one document are
/// contiguous and concatenate back to the original text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptSpan {
    /// Unicode script name, e.g. "Latin" or "Armenian".
    pub script: String,
    pub start: usize,
    pub end: usize,
}

/// A single-script text span labeled for training, e.g. `tur_Armenian`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSegment {
    pub label: String,
    pub text: String,
    pub doc_id: String,
}

/// One manifest line: where a document lives and what the catalog says about it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub path: String,
    pub language: Option<String>,
    pub year: Option<i32>,
}

/// A corpus index: one JSON object per line, see [`CorpusManifest::from_jsonl`].
#[derive(Debug, Clone, Default)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
}

impl CorpusManifest {
    /// Parses a JSON-lines manifest. Blank lines are skipped; any malformed
    /// line or duplicate id is a hard error.
    pub fn from_jsonl<R: BufRead>(reader: R) -> Result<Self> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: ManifestEntry =
                serde_json::from_str(&line).map_err(|e| Error::ManifestParse {
                    line: i + 1,
                    reason: e.to_string(),
                })?;
            if entry.id.is_empty() {
                return Err(Error::ManifestParse {
                    line: i + 1,
                    reason: "empty id".into(),
                });
            }
            if !seen.insert(entry.id.clone()) {
                return Err(Error::DuplicateId(entry.id));
            }
            entries.push(entry);
        }
        Ok(Self { entries })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_jsonl(BufReader::new(fs::File::open(path)?))
    }

    pub fn write_jsonl<W: Write>(&self, mut writer: W) -> Result<()> {
        for entry in &self.entries {
            serde_json::to_writer(&mut writer, entry)?;
            writeln!(writer)?;
        }
        Ok(())
    }
}

/// What happened during ingest: loaded documents plus per-entry warnings for
/// files that could not be read.
#[derive(Debug, Default)]
pub struct IngestOutcome {
    pub documents: Vec<Document>,
    pub warnings: Vec<String>,
}

/// Reads every manifest entry into a [`Document`]. Relative paths resolve
/// against `base`. Unreadable files are reported as warnings, not errors.
pub fn ingest(manifest: &CorpusManifest, base: &Path) -> Result<IngestOutcome> {
    let mut outcome = IngestOutcome::default();
    for entry in &manifest.entries {
        let raw = PathBuf::from(&entry.path);
        let path = if raw.is_absolute() { raw } else { base.join(raw) };
        match fs::read_to_string(&path) {
            Ok(text) => outcome.documents.push(Document {
                id: entry.id.clone(),
                text,
                language_label: entry.language.clone(),
                year: entry.year,
                source: path.display().to_string(),
            }),
            Err(e) => outcome.warnings.push(format!(
                "skipping {:?}: cannot read {}: {}",
                entry.id,
                path.display(),
                e
            )),
        }
    }
    Ok(outcome)
}

/// Reassembles a document from `(start, end, text)` parts.
///
/// Parts may arrive in any order; they must tile `[0, total)` exactly.
pub fn reconstruct(parts: &[(usize, usize, &str)]) -> Result<String> {
    let mut sorted: Vec<&(usize, usize, &str)> = parts.iter().collect();
    sorted.sort_by_key(|p| p.0);
    let mut text = String::new();
    let mut cursor = 0usize;
    for &&(start, end, slice) in &sorted {
        if start > cursor {
            return Err(Error::ReconstructGap {
                expected: cursor,
                found: start,
            });
        }
        if start < cursor {
            return Err(Error::ReconstructOverlap {
                start,
                previous_end: cursor,
            });
        }
        debug_assert_eq!(end - start, slice.len());
        text.push_str(slice);
        cursor = end;
    }
    Ok(text)
}
