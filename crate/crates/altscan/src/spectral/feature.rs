use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{fft, magnitude_half_spectrum};
use crate::error::{Error, Result};

/// A document's fixed-length spectrum descriptor; `bins` spans normalized
/// frequency (0, 0.5] and has unit L2 norm unless the spectrum is
/// identically zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFeature {
    pub doc_id: String,
    pub bins: Vec<f64>,
}

/// Optional amplitude taper applied before the transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Taper {
    /// Raw transform; spectral leakage is accepted.
    #[default]
    None,
    /// Hann taper, for spectra meant for close visual reading.
    Hann,
}

/// Fixed-length spectrum descriptor of a signal, comparable across signals
/// of different lengths.
///
/// Pipeline: subtract the mean (kills the DC bin), transform, take half-
/// spectrum magnitudes, drop bin 0, linearly interpolate onto `bin_count`
/// evenly spaced frequencies over (0, 0.5], L2-normalize. Grid points below
/// the first spectral bin clamp to that bin's magnitude. A constant signal
/// yields the all-zero vector.
pub fn feature_vector(signal: &[f64], bin_count: usize) -> Result<Vec<f64>> {
    feature_vector_tapered(signal, bin_count, Taper::None)
}

/// [`feature_vector`] with an explicit [`Taper`].
pub fn feature_vector_tapered(
    signal: &[f64],
    bin_count: usize,
    taper: Taper,
) -> Result<Vec<f64>> {
    if signal.len() < 4 {
        return Err(Error::SignalTooShort(signal.len()));
    }
    if bin_count < 8 {
        return Err(Error::BinCountTooSmall(bin_count));
    }
    let first = signal[0];
    if signal.iter().all(|&x| x == first) {
        return Ok(vec![0.0; bin_count]);
    }
    let mean = signal.iter().sum::<f64>() / signal.len() as f64;
    let mut centered: Vec<f64> = signal.iter().map(|x| x - mean).collect();
    if taper == Taper::Hann {
        let n = centered.len();
        for (i, value) in centered.iter_mut().enumerate() {
            *value *= 0.5 * (1.0 - (2.0 * PI * i as f64 / (n - 1) as f64).cos());
        }
    }
    let spectrum = fft(&centered)?;
    let magnitudes = magnitude_half_spectrum(&spectrum);
    let bins = interpolate(&magnitudes, spectrum.len(), bin_count);
    Ok(l2_normalize(bins))
}

/// Samples magnitudes (indexed by spectral bin k at frequency k/padded_len,
/// bin 0 excluded) at bin_count frequencies 0.5·(i+1)/bin_count.
fn interpolate(magnitudes: &[f64], padded_len: usize, bin_count: usize) -> Vec<f64> {
    let half = magnitudes.len() - 1;
    (0..bin_count)
        .map(|i| {
            let f = 0.5 * (i + 1) as f64 / bin_count as f64;
            let t = f * padded_len as f64;
            if t <= 1.0 {
                return magnitudes[1];
            }
            let k = t.floor() as usize;
            if k >= half {
                return magnitudes[half];
            }
            magnitudes[k] + (t - k as f64) * (magnitudes[k + 1] - magnitudes[k])
        })
        .collect()
}

fn l2_normalize(mut bins: Vec<f64>) -> Vec<f64> {
    let norm = bins.iter().map(|b| b * b).sum::<f64>().sqrt();
    if norm > 0.0 {
        for b in &mut bins {
            *b /= norm;
        }
    }
    bins
}
