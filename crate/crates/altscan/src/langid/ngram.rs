use std::collections::{BTreeMap, BTreeSet};

use super::{label_statistics, softmax, uniform, LabelSet, Predictor};
use crate::corpus::LabeledSegment;
use crate::error::{Error, Result};

/// Start-of-text sentinel padding the first n-1 contexts.
const BOS: char = '\u{0002}';

#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct ContextCounts {
    pub(crate) total: u64,
    pub(crate) next: BTreeMap<char, u64>,
}

/// Character n-gram language model: per label, smoothed next-character
/// distributions conditioned on the previous n-1 characters.
#[derive(Debug, Clone, PartialEq)]
pub struct CharNgramModel {
    pub(crate) labels: LabelSet,
    pub(crate) order: usize,
    pub(crate) smoothing: f64,
    pub(crate) log_priors: Vec<f64>,
    pub(crate) tables: Vec<BTreeMap<String, ContextCounts>>,
    /// Next-character vocabulary across all labels; one extra smoothing
    /// slot stands in for every character outside it.
    pub(crate) vocab: BTreeSet<char>,
}

/// Trains a [`CharNgramModel`] of the given order with additive smoothing.
pub fn train_char_ngram(
    segments: &[LabeledSegment],
    order: usize,
    smoothing: f64,
) -> Result<CharNgramModel> {
    if order < 1 {
        return Err(Error::InvalidOrder(order));
    }
    if smoothing <= 0.0 || !smoothing.is_finite() {
        return Err(Error::InvalidSmoothing(smoothing));
    }
    let labels = LabelSet::from_segments(segments)?;
    let (log_priors, _) = label_statistics(segments, &labels)?;
    let mut tables = vec![BTreeMap::<String, ContextCounts>::new(); labels.len()];
    let mut vocab = BTreeSet::new();
    for segment in segments {
        let idx = labels.index(&segment.label).expect("label set covers segments");
        let mut context: Vec<char> = vec![BOS; order - 1];
        for c in segment.text.chars() {
            vocab.insert(c);
            let entry = tables[idx]
                .entry(context.iter().collect::<String>())
                .or_default();
            entry.total += 1;
            *entry.next.entry(c).or_default() += 1;
            if order > 1 {
                context.rotate_left(1);
                context[order - 2] = c;
            }
        }
    }
    Ok(CharNgramModel {
        labels,
        order,
        smoothing,
        log_priors,
        tables,
        vocab,
    })
}

impl CharNgramModel {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Smoothed p(next | context) for one label. `None` is the slot shared
    /// by every character outside the training vocabulary.
    fn context_probability(&self, label: usize, context: &str, next: Option<char>) -> f64 {
        let slots = (self.vocab.len() + 1) as f64;
        let (count, total) = match self.tables[label].get(context) {
            Some(counts) => {
                let count = next
                    .filter(|c| self.vocab.contains(c))
                    .and_then(|c| counts.next.get(&c))
                    .copied()
                    .unwrap_or(0);
                (count as f64, counts.total as f64)
            }
            None => (0.0, 0.0),
        };
        (count + self.smoothing) / (total + self.smoothing * slots)
    }
}

impl Predictor for CharNgramModel {
    fn label_set(&self) -> &LabelSet {
        &self.labels
    }

    fn predict(&self, text: &str) -> Vec<f64> {
        let chars: Vec<char> = text.chars().collect();
        if chars.is_empty() {
            return uniform(self.labels.len());
        }
        let mut scores = self.log_priors.clone();
        let mut context: Vec<char> = vec![BOS; self.order - 1];
        for &c in &chars {
            let key: String = context.iter().collect();
            for (label, score) in scores.iter_mut().enumerate() {
                *score += self.context_probability(label, &key, Some(c)).ln();
            }
            if self.order > 1 {
                context.rotate_left(1);
                context[self.order - 2] = c;
            }
        }
        for score in &mut scores {
            *score /= chars.len() as f64;
        }
        softmax(&scores)
    }
}
