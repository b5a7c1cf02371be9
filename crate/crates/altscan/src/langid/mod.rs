//! Character-level language identification.
//!
//! Three model families over the same label space: multinomial naive Bayes
//! over bags of character n-grams, a character n-gram language model scored
//! per character, and a hashed-n-gram linear classifier trained by SGD.
//! All three implement [`Predictor`]: text in, probability distribution over
//! the label set out.

mod eval;
mod hashed;
mod nb;
mod ngram;
mod store;

pub use eval::{evaluate, stratified_split, EvalReport, LabelScores};
pub use hashed::{train_hashed_linear, HashedLinearModel, HashedLinearParams};
pub(crate) use hashed::fnv1a;
pub use nb::{train_naive_bayes, NaiveBayesModel};
pub use ngram::{train_char_ngram, CharNgramModel};
pub use store::AnyModel;

use serde::{Deserialize, Serialize};

use crate::corpus::LabeledSegment;
use crate::error::{Error, Result};

/// The ordered set of `language_script` labels a model scores against.
/// Labels are kept sorted, so positions are reproducible across runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet {
    labels: Vec<String>,
}

impl LabelSet {
    pub fn new(labels: impl IntoIterator<Item = String>) -> Self {
        let mut labels: Vec<String> = labels.into_iter().collect();
        labels.sort();
        labels.dedup();
        Self { labels }
    }

    pub fn from_segments(segments: &[LabeledSegment]) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        Ok(Self::new(segments.iter().map(|s| s.label.clone())))
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// A trained language identifier.
pub trait Predictor {
    fn label_set(&self) -> &LabelSet;

    /// Probability of each label for `text`, aligned to [`Self::label_set`].
    /// Always a valid distribution; text too short to score is uniform.
    fn predict(&self, text: &str) -> Vec<f64>;

    /// Index of the most probable label, lowest index on ties.
    fn predict_argmax(&self, text: &str) -> usize {
        let probs = self.predict(text);
        probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .expect("label sets are never empty")
    }
}

pub(crate) fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

pub(crate) fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Calls `f` with every character n-gram of `text` for n in `n_min..=n_max`.
pub(crate) fn for_each_ngram(text: &str, n_min: usize, n_max: usize, mut f: impl FnMut(&str)) {
    let bounds: Vec<usize> = text
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(text.len()))
        .collect();
    let chars = bounds.len() - 1;
    for n in n_min..=n_max {
        if n > chars {
            break;
        }
        for i in 0..=chars - n {
            f(&text[bounds[i]..bounds[i + n]]);
        }
    }
}

pub(crate) fn check_ngram_range(n_min: usize, n_max: usize) -> Result<()> {
    if n_min < 1 || n_max < n_min {
        return Err(Error::InvalidNgramRange(n_min, n_max));
    }
    Ok(())
}

/// Log prior per label from relative segment counts, plus the per-label
/// total character count (used to reject labels with no text at all).
pub(crate) fn label_statistics(
    segments: &[LabeledSegment],
    labels: &LabelSet,
) -> Result<(Vec<f64>, Vec<usize>)> {
    let mut segment_counts = vec![0usize; labels.len()];
    let mut char_counts = vec![0usize; labels.len()];
    for segment in segments {
        let idx = labels
            .index(&segment.label)
            .ok_or_else(|| Error::UnknownLabel(segment.label.clone()))?;
        segment_counts[idx] += 1;
        char_counts[idx] += segment.text.chars().count();
    }
    for (idx, &chars) in char_counts.iter().enumerate() {
        if chars == 0 {
            return Err(Error::EmptyLabel(labels.get(idx).to_string()));
        }
    }
    let total = segments.len() as f64;
    let log_priors = segment_counts
        .iter()
        .map(|&c| (c as f64 / total).ln())
        .collect();
    Ok((log_priors, char_counts))
}

#[cfg(test)]
pub(crate) fn segment(label: &str, text: &str) -> LabeledSegment {
    LabeledSegment {
        label: label.to_string(),
        text: text.to_string(),
        doc_id: "test".to_string(),
    }
}
