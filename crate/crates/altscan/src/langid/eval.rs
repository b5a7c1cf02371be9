use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Predictor;
use crate::corpus::LabeledSegment;
use crate::error::{Error, Result};

/// Precision, recall, and F1 for one label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelScores {
    pub p: f64,
    pub r: f64,
    pub f1: f64,
}

/// Classification quality report. The confusion matrix is indexed
/// `[true label][predicted label]` in sorted label order (the same order as
/// the `per_label` map).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub macro_f1: f64,
    pub per_label: BTreeMap<String, LabelScores>,
    pub confusion: Vec<Vec<u64>>,
}

impl EvalReport {
    /// Derives per-label scores and macro F1 from a confusion matrix.
    /// A label with precision + recall = 0 contributes F1 = 0.
    pub fn from_confusion(labels: &[String], confusion: Vec<Vec<u64>>) -> Self {
        let n = labels.len();
        let mut per_label = BTreeMap::new();
        let mut f1_sum = 0.0;
        for l in 0..n {
            let hits = confusion[l][l] as f64;
            let predicted: u64 = (0..n).map(|t| confusion[t][l]).sum();
            let actual: u64 = confusion[l].iter().sum();
            let p = if predicted == 0 { 0.0 } else { hits / predicted as f64 };
            let r = if actual == 0 { 0.0 } else { hits / actual as f64 };
            let f1 = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
            f1_sum += f1;
            per_label.insert(labels[l].clone(), LabelScores { p, r, f1 });
        }
        EvalReport {
            macro_f1: f1_sum / n as f64,
            per_label,
            confusion,
        }
    }
}

/// Argmax-classifies every test segment and scores the confusion matrix.
pub fn evaluate<P: Predictor + ?Sized>(
    model: &P,
    test_segments: &[LabeledSegment],
) -> Result<EvalReport> {
    if test_segments.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    let labels = model.label_set();
    let n = labels.len();
    let mut confusion = vec![vec![0u64; n]; n];
    for segment in test_segments {
        let truth = labels
            .index(&segment.label)
            .ok_or_else(|| Error::UnknownLabel(segment.label.clone()))?;
        confusion[truth][model.predict_argmax(&segment.text)] += 1;
    }
    Ok(EvalReport::from_confusion(labels.labels(), confusion))
}

/// Deterministic train/test split keeping the test fraction per label.
/// Labels with a single segment stay entirely in the training set; with two
/// or more, at least one segment lands on each side whenever the fraction
/// is neither 0 nor 1.
pub fn stratified_split(
    segments: &[LabeledSegment],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<LabeledSegment>, Vec<LabeledSegment>)> {
    if !(0.0..=1.0).contains(&test_fraction) {
        return Err(Error::InvalidHyperparameter(format!(
            "test fraction {test_fraction} outside [0, 1]"
        )));
    }
    let mut by_label: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, segment) in segments.iter().enumerate() {
        by_label.entry(&segment.label).or_default().push(i);
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut test_indices = Vec::new();
    for ids in by_label.values() {
        let mut rng = ChaCha8Rng::seed_from_u64(master.gen());
        let mut shuffled = ids.clone();
        shuffled.shuffle(&mut rng);
        let mut take = ((ids.len() as f64) * test_fraction).round() as usize;
        take = take.min(ids.len().saturating_sub(1));
        if test_fraction > 0.0 && ids.len() >= 2 {
            take = take.max(1);
        }
        test_indices.extend_from_slice(&shuffled[..take]);
    }
    test_indices.sort_unstable();
    let mut test_iter = test_indices.iter().peekable();
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, segment) in segments.iter().enumerate() {
        if test_iter.peek() == Some(&&i) {
            test_iter.next();
            test.push(segment.clone());
        } else {
            train.push(segment.clone());
        }
    }
    Ok((train, test))
}
