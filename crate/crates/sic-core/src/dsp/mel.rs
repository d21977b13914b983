//! Mel filterbank and DCT-II basis used by the cepstral front end.

use alloc::vec::Vec;


// Float supplies the f64 math methods in no_std builds; whenever std is
// elsewhere in the crate graph the inherent methods shadow it, so the
// import looks unused there.
#[allow(unused_imports)]
use num_traits::Float;
use crate::matrix::Matrix;

/// HTK mel scale.
pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10.0f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular mel filterbank as an `n_mels x (n_fft/2 + 1)` matrix acting on
/// one-sided power spectra.
///
/// Filter centers are spaced uniformly on the mel scale between `fmin_hz`
/// and `fmax_hz`; each row is non-negative with a single triangular peak,
/// and peaks move strictly up in frequency with the filter index.
pub fn mel_filterbank(
    n_mels: usize,
    n_fft: usize,
    sample_rate_hz: u32,
    fmin_hz: f64,
    fmax_hz: f64,
) -> Matrix {
    let n_bins = n_fft / 2 + 1;
    let bin_hz = f64::from(sample_rate_hz) / n_fft as f64;

    let mel_lo = hz_to_mel(fmin_hz);
    let mel_hi = hz_to_mel(fmax_hz);
    // n_mels triangles need n_mels + 2 edge frequencies.
    let edges_hz: Vec<f64> = (0..n_mels + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (n_mels + 1) as f64))
        .collect();

    let mut bank = Matrix::zeros(n_mels, n_bins);
    for m in 0..n_mels {
        let (left, center, right) = (edges_hz[m], edges_hz[m + 1], edges_hz[m + 2]);
        let row = bank.row_mut(m);
        for (k, w) in row.iter_mut().enumerate() {
            let f = k as f64 * bin_hz;
            let rising = (f - left) / (center - left);
            let falling = (right - f) / (right - center);
            *w = rising.min(falling).max(0.0);
        }
    }
    bank
}

/// Orthonormal DCT-II basis of size `n x n`: `B[k][t] = s_k * cos(pi*(2t+1)*k / (2n))`
/// with `s_0 = sqrt(1/n)` and `s_k = sqrt(2/n)` otherwise, so `B * B^T = I`.
pub fn dct_matrix(n: usize) -> Matrix {
    let mut b = Matrix::zeros(n, n);
    for k in 0..n {
        let scale = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        for t in 0..n {
            let angle = core::f64::consts::PI * (2 * t + 1) as f64 * k as f64 / (2 * n) as f64;
            b.set(k, t, scale * angle.cos());
        }
    }
    b
}
