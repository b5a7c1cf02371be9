use std::collections::BTreeMap;

use super::{check_ngram_range, for_each_ngram, label_statistics, softmax, uniform, LabelSet, Predictor};
use crate::corpus::LabeledSegment;
use crate::error::{Error, Result};

/// Multinomial naive Bayes over bags of character n-grams with additive
/// smoothing. Scores are unnormalized log posteriors, so long unambiguous
/// texts saturate the softmax; that is intended — the windowed pipeline
/// relies on confident per-window calls.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    pub(crate) labels: LabelSet,
    pub(crate) n_min: usize,
    pub(crate) n_max: usize,
    pub(crate) alpha: f64,
    pub(crate) log_priors: Vec<f64>,
    /// n-gram → per-label counts. N-grams never seen in training are
    /// ignored at prediction time.
    pub(crate) counts: BTreeMap<String, Vec<u64>>,
    /// Per-label total n-gram occurrences.
    pub(crate) totals: Vec<u64>,
}

/// Trains a [`NaiveBayesModel`] on n-grams in `n_range` with smoothing
/// constant `alpha`.
pub fn train_naive_bayes(
    segments: &[LabeledSegment],
    n_range: (usize, usize),
    alpha: f64,
) -> Result<NaiveBayesModel> {
    let (n_min, n_max) = n_range;
    check_ngram_range(n_min, n_max)?;
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidSmoothing(alpha));
    }
    let labels = LabelSet::from_segments(segments)?;
    let (log_priors, _) = label_statistics(segments, &labels)?;
    let mut counts = BTreeMap::<String, Vec<u64>>::new();
    let mut totals = vec![0u64; labels.len()];
    for segment in segments {
        let idx = labels.index(&segment.label).expect("label set covers segments");
        for_each_ngram(&segment.text, n_min, n_max, |gram| {
            counts.entry(gram.to_string()).or_insert_with(|| vec![0; totals.len()])[idx] += 1;
            totals[idx] += 1;
        });
    }
    Ok(NaiveBayesModel {
        labels,
        n_min,
        n_max,
        alpha,
        log_priors,
        counts,
        totals,
    })
}

impl NaiveBayesModel {
    pub fn ngram_range(&self) -> (usize, usize) {
        (self.n_min, self.n_max)
    }

    /// Smoothed log p(gram | label); the denominator smooths over the
    /// global n-gram vocabulary.
    fn log_likelihood(&self, gram_counts: &[u64], label: usize) -> f64 {
        let vocab = self.counts.len() as f64;
        ((gram_counts[label] as f64 + self.alpha)
            / (self.totals[label] as f64 + self.alpha * vocab))
            .ln()
    }
}

impl Predictor for NaiveBayesModel {
    fn label_set(&self) -> &LabelSet {
        &self.labels
    }

    fn predict(&self, text: &str) -> Vec<f64> {
        let mut scores = self.log_priors.clone();
        let mut seen_any = false;
        for_each_ngram(text, self.n_min, self.n_max, |gram| {
            if let Some(gram_counts) = self.counts.get(gram) {
                seen_any = true;
                for (label, score) in scores.iter_mut().enumerate() {
                    *score += self.log_likelihood(gram_counts, label);
                }
            }
        });
        if !seen_any && text.chars().count() < self.n_min {
            return uniform(self.labels.len());
        }
        softmax(&scores)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::langid::segment;

    #[test]
    fn disjoint_alphabets_classify_held_out_text() {
        let segments = [
            segment("L1", "abab ababa abba"),
            segment("L2", "xyxy xyxyx xyyx"),
        ];
        let model = train_naive_bayes(&segments, (1, 2), 0.1).unwrap();
        assert_eq!(model.predict_argmax("abba abab"), 0);
        assert_eq!(model.predict_argmax("yxxy xy"), 1);
    }

    #[test]
    fn zero_alpha_is_rejected() {
        let segments = [segment("L1", "aa"), segment("L2", "bb")];
        assert!(matches!(
            train_naive_bayes(&segments, (1, 2), 0.0),
            Err(Error::InvalidSmoothing(_))
        ));
    }

    #[test]
    fn invalid_ngram_range_is_rejected() {
        let segments = [segment("L1", "aa"), segment("L2", "bb")];
        assert!(matches!(
            train_naive_bayes(&segments, (3, 2), 0.1),
            Err(Error::InvalidNgramRange(3, 2))
        ));
        assert!(matches!(
            train_naive_bayes(&segments, (0, 2), 0.1),
            Err(Error::InvalidNgramRange(0, 2))
        ));
    }

    #[test]
    fn three_label_posterior_matches_hand_arithmetic() {
        // Unigrams, alpha 0.1. Counts: X{a:2,c:1}, Y{b:2,c:1}, Z{c:2};
        // vocabulary {a,b,c}. Equal priors cancel, so predicting "c" gives
        // posteriors proportional to the three smoothed likelihoods.
        let segments = [segment("X", "aac"), segment("Y", "bbc"), segment("Z", "cc")];
        let model = train_naive_bayes(&segments, (1, 1), 0.1).unwrap();

        let like_x = (1.0 + 0.1) / (3.0 + 0.3);
        let like_y = (1.0 + 0.1) / (3.0 + 0.3);
        let like_z = (2.0 + 0.1) / (2.0 + 0.3);
        let total = like_x + like_y + like_z;

        let got = model.predict("c");
        assert!((got[0] - like_x / total).abs() < 1e-12, "{got:?}");
        assert!((got[1] - like_y / total).abs() < 1e-12);
        assert!((got[2] - like_z / total).abs() < 1e-12);
    }

    #[test]
    fn long_unambiguous_text_saturates_exactly() {
        let segments = [
            segment("L1", &"abc ".repeat(40)),
            segment("L2", &"xyz ".repeat(40)),
        ];
        let model = train_naive_bayes(&segments, (2, 4), 0.1).unwrap();
        let probs = model.predict(&"abc ".repeat(80));
        assert_eq!(probs, [1.0, 0.0]);
    }

    #[test]
    fn too_short_text_is_uniform() {
        let segments = [segment("L1", "aaaa"), segment("L2", "bbbb")];
        let model = train_naive_bayes(&segments, (2, 3), 0.1).unwrap();
        assert_eq!(model.predict("a"), [0.5, 0.5]);
        assert_eq!(model.predict(""), [0.5, 0.5]);
    }

    #[test]
    fn prediction_is_a_distribution() {
        let segments = [segment("L1", "hello world"), segment("L2", "мир привет")];
        let model = train_naive_bayes(&segments, (1, 3), 0.1).unwrap();
        for text in ["hello", "привет", "hello мир", "!!!"] {
            let probs = model.predict(text);
            assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9, "{text}");
            assert!(probs.iter().all(|p| *p >= 0.0));
        }
    }
}
