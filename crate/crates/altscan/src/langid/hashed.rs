use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_ngram_range, for_each_ngram, softmax, LabelSet, Predictor};
use crate::corpus::LabeledSegment;
use crate::error::{Error, Result};

/// Hyperparameters for [`train_hashed_linear`].
#[derive(Debug, Clone, PartialEq)]
pub struct HashedLinearParams {
    pub n_min: usize,
    pub n_max: usize,
    /// Hash table size; must be a power of two (the hash is masked).
    pub bucket_count: usize,
    pub dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for HashedLinearParams {
    fn default() -> Self {
        Self {
            n_min: 2,
            n_max: 4,
            bucket_count: 1 << 18,
            dim: 16,
            epochs: 5,
            learning_rate: 0.2,
            seed: 0,
        }
    }
}

impl HashedLinearParams {
    fn validate(&self) -> Result<()> {
        check_ngram_range(self.n_min, self.n_max)?;
        let invalid = |reason: &str| Err(Error::InvalidHyperparameter(reason.to_string()));
        if !self.bucket_count.is_power_of_two() {
            return invalid("bucket_count must be a power of two");
        }
        if self.dim < 2 {
            return invalid("dim must be at least 2");
        }
        if self.epochs < 1 {
            return invalid("epochs must be at least 1");
        }
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return invalid("learning rate must be positive");
        }
        Ok(())
    }
}

/// Linear classifier over hashed character n-grams: a text is the mean of
/// its n-gram bucket embeddings, classified by a softmax layer.
#[derive(Debug, Clone, PartialEq)]
pub struct HashedLinearModel {
    pub(crate) labels: LabelSet,
    pub(crate) params: HashedLinearParams,
    /// bucket_count × dim, row-major by bucket.
    pub(crate) embeddings: Vec<f64>,
    /// labels × dim, row-major by label.
    pub(crate) output: Vec<f64>,
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

impl HashedLinearModel {
    pub fn params(&self) -> &HashedLinearParams {
        &self.params
    }

    fn buckets(&self, text: &str) -> Vec<usize> {
        bucket_ids(text, &self.params)
    }

    /// Mean of the text's bucket embeddings; zero vector when the text has
    /// no n-grams.
    fn embed(&self, ids: &[usize]) -> Vec<f64> {
        let dim = self.params.dim;
        let mut h = vec![0.0; dim];
        if ids.is_empty() {
            return h;
        }
        for &id in ids {
            let row = &self.embeddings[id * dim..(id + 1) * dim];
            for (v, e) in h.iter_mut().zip(row) {
                *v += e;
            }
        }
        for v in &mut h {
            *v /= ids.len() as f64;
        }
        h
    }

    fn scores(&self, h: &[f64]) -> Vec<f64> {
        let dim = self.params.dim;
        (0..self.labels.len())
            .map(|l| (0..dim).map(|d| self.output[l * dim + d] * h[d]).sum())
            .collect()
    }
}

fn bucket_ids(text: &str, params: &HashedLinearParams) -> Vec<usize> {
    let mask = params.bucket_count - 1;
    let mut ids = Vec::new();
    for_each_ngram(text, params.n_min, params.n_max, |gram| {
        ids.push((fnv1a(gram.as_bytes()) & mask as u64) as usize);
    });
    ids
}

/// Trains the classifier by SGD on cross-entropy, one segment per step,
/// shuffling the segment order each epoch. Returns the model and the mean
/// training loss per epoch. Deterministic for a fixed seed and data order.
pub fn train_hashed_linear(
    segments: &[LabeledSegment],
    params: &HashedLinearParams,
) -> Result<(HashedLinearModel, Vec<f64>)> {
    params.validate()?;
    let labels = LabelSet::from_segments(segments)?;
    super::label_statistics(segments, &labels)?;
    let dim = params.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let scale = 1.0 / dim as f64;
    let mut model = HashedLinearModel {
        embeddings: (0..params.bucket_count * dim)
            .map(|_| rng.gen_range(-scale..scale))
            .collect(),
        output: vec![0.0; labels.len() * dim],
        labels,
        params: params.clone(),
    };
    let examples: Vec<(usize, Vec<usize>)> = segments
        .iter()
        .map(|s| {
            let target = model.labels.index(&s.label).expect("label set covers segments");
            (target, bucket_ids(&s.text, params))
        })
        .filter(|(_, ids)| !ids.is_empty())
        .collect();
    let lr = params.learning_rate;
    let mut epoch_losses = Vec::with_capacity(params.epochs);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for (step, &example) in order.iter().enumerate() {
            let (target, ref ids) = examples[example];
            let h = model.embed(ids);
            let probs = softmax(&model.scores(&h));
            let loss = -probs[target].ln();
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, step });
            }
            loss_sum += loss;
            let mut grad_scores = probs;
            grad_scores[target] -= 1.0;
            let mut grad_h = vec![0.0; dim];
            for (l, &g) in grad_scores.iter().enumerate() {
                let row = &model.output[l * dim..(l + 1) * dim];
                for (gh, w) in grad_h.iter_mut().zip(row) {
                    *gh += w * g;
                }
            }
            for (l, &g) in grad_scores.iter().enumerate() {
                let row = &mut model.output[l * dim..(l + 1) * dim];
                for (w, hv) in row.iter_mut().zip(&h) {
                    *w -= lr * g * hv;
                }
            }
            let share = lr / ids.len() as f64;
            for &id in ids {
                let row = &mut model.embeddings[id * dim..(id + 1) * dim];
                for (e, gh) in row.iter_mut().zip(&grad_h) {
                    *e -= share * gh;
                }
            }
        }
        epoch_losses.push(loss_sum / examples.len().max(1) as f64);
    }
    Ok((model, epoch_losses))
}

impl Predictor for HashedLinearModel {
    fn label_set(&self) -> &LabelSet {
        &self.labels
    }

    fn predict(&self, text: &str) -> Vec<f64> {
        let ids = self.buckets(text);
        let h = self.embed(&ids);
        softmax(&self.scores(&h))
    }
}
