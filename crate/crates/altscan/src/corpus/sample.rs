use std::collections::{BTreeMap, HashSet};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{segment_by_script, Document, LabeledSegment};

/// Controls for [`temporal_sample`].
#[derive(Debug, Clone, Copy)]
pub struct SampleOptions {
    /// Number of equal-width year intervals per language.
    pub bucket_count: usize,
    /// Extra documents drawn per language after the bucket draw.
    pub extra_count: usize,
    pub rng_seed: u64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            bucket_count: 5,
            extra_count: 5,
            rng_seed: 0,
        }
    }
}

/// Result of [`temporal_sample`]: the selection plus per-document warnings.
#[derive(Debug, Default)]
pub struct SampleOutcome {
    pub documents: Vec<Document>,
    pub warnings: Vec<String>,
}

/// Index of the year bucket covering `year`, for equal-width intervals over
/// `[min, max]` closed on the left, final bucket closed on both ends.
pub(crate) fn bucket_index(year: i32, min: i32, max: i32, bucket_count: usize) -> usize {
    if max <= min {
        return 0;
    }
    let width = f64::from(max - min) / bucket_count as f64;
    let idx = (f64::from(year - min) / width).floor() as usize;
    idx.min(bucket_count - 1)
}

/// Draws a temporally diverse selection per language: the language's year
/// range is split into `bucket_count` equal-width intervals, one document is
/// drawn uniformly from each non-empty bucket, then `extra_count` more are
/// drawn without replacement from the rest of the language.
///
/// Undated documents cannot be bucketed (each produces a warning) but stay
/// eligible for the extra draw. Selection is deterministic for a given seed
/// and independent of input order; no document is ever selected twice.
pub fn temporal_sample(docs: &[Document], opts: &SampleOptions) -> SampleOutcome {
    let mut outcome = SampleOutcome::default();
    let mut groups: BTreeMap<&str, Vec<&Document>> = BTreeMap::new();
    for doc in docs {
        match doc.language_label.as_deref() {
            Some(label) => groups.entry(label).or_default().push(doc),
            None => outcome
                .warnings
                .push(format!("{:?}: no language label, not sampled", doc.id)),
        }
    }
    let mut master = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    for (label, mut group) in groups {
        let mut rng = ChaCha8Rng::seed_from_u64(master.gen());
        group.sort_by(|a, b| a.id.cmp(&b.id));
        let dated: Vec<&Document> = group.iter().copied().filter(|d| d.year.is_some()).collect();
        for doc in group.iter().filter(|d| d.year.is_none()) {
            outcome.warnings.push(format!(
                "{:?} ({}): no year, excluded from bucketing",
                doc.id, label
            ));
        }
        let mut picked: HashSet<&str> = HashSet::new();
        if let (Some(min), Some(max)) = (
            dated.iter().filter_map(|d| d.year).min(),
            dated.iter().filter_map(|d| d.year).max(),
        ) {
            let bucket_count = opts.bucket_count.max(1);
            let mut buckets: Vec<Vec<&Document>> = vec![Vec::new(); bucket_count];
            for &doc in &dated {
                let year = doc.year.expect("dated documents have years");
                buckets[bucket_index(year, min, max, bucket_count)].push(doc);
            }
            for bucket in &buckets {
                if bucket.is_empty() {
                    continue;
                }
                let choice = bucket[rng.gen_range(0..bucket.len())];
                picked.insert(choice.id.as_str());
                outcome.documents.push(choice.clone());
            }
        }
        let remainder: Vec<&Document> = group
            .iter()
            .copied()
            .filter(|d| !picked.contains(d.id.as_str()))
            .collect();
        let take = opts.extra_count.min(remainder.len());
        let mut extra_indices = index::sample(&mut rng, remainder.len(), take).into_vec();
        extra_indices.sort_unstable();
        for i in extra_indices {
            outcome.documents.push(remainder[i].clone());
        }
    }
    outcome
}

/// Hand-designated documents carrying a `language_script` label that their
/// catalog metadata does not reflect.
#[derive(Debug, Clone)]
pub struct PositiveSet {
    /// Full training label, e.g. `tur_Armenian`.
    pub label: String,
    pub doc_ids: HashSet<String>,
}

impl PositiveSet {
    pub fn new(label: impl Into<String>, doc_ids: impl IntoIterator<Item = String>) -> Self {
        Self {
            label: label.into(),
            doc_ids: doc_ids.into_iter().collect(),
        }
    }

    /// Script component of the label (`Armenian` for `tur_Armenian`).
    pub fn script(&self) -> &str {
        self.label
            .rsplit_once('_')
            .map_or(self.label.as_str(), |(_, script)| script)
    }
}

/// Labeled single-script segments plus per-document warnings.
#[derive(Debug, Default)]
pub struct TrainingSet {
    pub segments: Vec<LabeledSegment>,
    pub warnings: Vec<String>,
}

/// Splits each document into script runs and labels every run
/// `<language>_<script>`. Documents in the positive set keep only runs whose
/// script matches the positive label's script, labeled with the positive
/// label itself. Documents with neither a language label nor positive
/// membership are skipped with a warning.
pub fn build_training_set(docs: &[Document], positive: Option<&PositiveSet>) -> TrainingSet {
    let mut set = TrainingSet::default();
    for doc in docs {
        let is_positive = positive.is_some_and(|p| p.doc_ids.contains(&doc.id));
        let language = doc.language_label.as_deref();
        if !is_positive && language.is_none() {
            set.warnings
                .push(format!("{:?}: no language label, skipped", doc.id));
            continue;
        }
        for span in segment_by_script(&doc.text) {
            let label = if is_positive {
                let positive = positive.expect("positive membership implies a positive set");
                if span.script != positive.script() {
                    continue;
                }
                positive.label.clone()
            } else {
                format!(
                    "{}_{}",
                    language.expect("non-positive documents were filtered above"),
                    span.script
                )
            };
            set.segments.push(LabeledSegment {
                label,
                text: doc.text[span.start..span.end].to_string(),
                doc_id: doc.id.clone(),
            });
        }
    }
    set
}
