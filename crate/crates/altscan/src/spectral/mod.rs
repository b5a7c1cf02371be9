//! Frequency-domain transforms over language signals.
//!
//! [`dft_naive`] is the brute-force O(N²) transform and serves as the
//! correctness oracle; [`fft`] is the O(N log N) radix-2 transform used by
//! the pipeline. Both return the full complex spectrum; real-signal callers
//! usually want [`magnitude_half_spectrum`] or [`feature_vector`].

mod feature;

pub use feature::{feature_vector, feature_vector_tapered, SpectrumFeature, Taper};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Direct evaluation of X_k = Σ_n x_n e^{-2πikn/N}.
///
/// Quadratic in the signal length; exists to pin down what [`fft`] must
/// produce, not for production use.
pub fn dft_naive(signal: &[f64]) -> Result<Vec<Complex64>> {
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    let n = signal.len();
    let twiddle: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64))
        .collect();
    Ok((0..n)
        .map(|k| {
            signal
                .iter()
                .enumerate()
                .map(|(i, &x)| x * twiddle[(k * i) % n])
                .sum()
        })
        .collect())
}

/// Iterative radix-2 transform of the signal zero-padded to the next power
/// of two. Output length is the padded length.
pub fn fft(signal: &[f64]) -> Result<Vec<Complex64>> {
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    let padded = signal.len().next_power_of_two();
    let mut buf: Vec<Complex64> = signal.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    buf.resize(padded, Complex64::new(0.0, 0.0));
    if padded == 1 {
        return Ok(buf);
    }
    let bits = padded.trailing_zeros();
    for i in 0..padded {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= padded {
        let step = -2.0 * PI / len as f64;
        let twiddle: Vec<Complex64> = (0..len / 2)
            .map(|i| Complex64::from_polar(1.0, step * i as f64))
            .collect();
        for start in (0..padded).step_by(len) {
            for i in 0..len / 2 {
                let u = buf[start + i];
                let v = buf[start + i + len / 2] * twiddle[i];
                buf[start + i] = u + v;
                buf[start + i + len / 2] = u - v;
            }
        }
        len <<= 1;
    }
    Ok(buf)
}

/// Magnitudes |X_k| for k = 0..=N/2. Real inputs obey X_k = conj(X_{N-k}),
/// so the upper half adds nothing.
pub fn magnitude_half_spectrum(spectrum: &[Complex64]) -> Vec<f64> {
    (0..=spectrum.len() / 2).map(|k| spectrum[k].norm()).collect()
}

/// `(normalized_frequency, magnitude)` rows for plotting one signal's raw
/// spectrum. No mean subtraction: bin 0 reports the plain DC magnitude.
pub fn spectrum_rows(signal: &[f64]) -> Result<Vec<(f64, f64)>> {
    let spectrum = fft(signal)?;
    let n = spectrum.len();
    Ok(magnitude_half_spectrum(&spectrum)
        .into_iter()
        .enumerate()
        .map(|(k, m)| (k as f64 / n as f64, m))
        .collect())
}
