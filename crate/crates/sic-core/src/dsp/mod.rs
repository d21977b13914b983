//! Per-frame feature extraction: 13 MFCC (dropping the 0th) plus deltas and
//! double deltas, 39 dimensions per frame.

pub mod fft;
pub mod mel;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

// Float supplies the f64 math methods in no_std builds; whenever std is
// elsewhere in the crate graph the inherent methods shadow it, so the
// import looks unused there.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Framing parameters. The defaults give ~92.9 ms frames with 50% overlap at
/// the canonical 22050 Hz rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub frame_len: usize,
    pub hop: usize,
}

impl Default for FrameSpec {
    fn default() -> FrameSpec {
        FrameSpec {
            frame_len: 2048,
            hop: 1024,
        }
    }
}

impl FrameSpec {
    pub fn validate(&self) -> Result<()> {
        if self.hop == 0 || self.hop > self.frame_len {
            return Err(Error::InvalidConfig(format!(
                "hop {} must satisfy 0 < hop <= frame_len {}",
                self.hop, self.frame_len
            )));
        }
        if !self.frame_len.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "frame_len {} must be a power of two",
                self.frame_len
            )));
        }
        Ok(())
    }

    /// Number of full frames in `n_samples`, or an error when not even one
    /// frame fits.
    pub fn n_frames(&self, n_samples: usize) -> Result<usize> {
        if n_samples < self.frame_len {
            return Err(Error::ClipTooShort {
                samples: n_samples,
                frame_len: self.frame_len,
            });
        }
        Ok((n_samples - self.frame_len) / self.hop + 1)
    }

    /// Center timestamp of frame `i` at the given rate.
    pub fn frame_center_s(&self, i: usize, sample_rate_hz: u32) -> f64 {
        (i * self.hop + self.frame_len / 2) as f64 / f64::from(sample_rate_hz)
    }
}

/// Cepstral front-end parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MfccConfig {
    pub n_mels: usize,
    /// Coefficients kept: indices `1..=n_coeffs` of the DCT output (the 0th,
    /// which carries overall log gain, is always dropped).
    pub n_coeffs: usize,
    pub fmin_hz: f64,
    /// Upper band edge; `None` means the Nyquist frequency of the clip.
    pub fmax_hz: Option<f64>,
    /// Mel energies are floored at this value before the natural log, so
    /// silent bands stay finite.
    pub log_floor: f64,
}

impl Default for MfccConfig {
    fn default() -> MfccConfig {
        MfccConfig {
            n_mels: 40,
            n_coeffs: 13,
            fmin_hz: 64.0,
            fmax_hz: None,
            log_floor: 1e-10,
        }
    }
}

impl MfccConfig {
    fn resolved_fmax(&self, sample_rate_hz: u32) -> f64 {
        self.fmax_hz
            .unwrap_or_else(|| f64::from(sample_rate_hz) / 2.0)
    }

    pub fn validate(&self, sample_rate_hz: u32) -> Result<()> {
        let nyquist = f64::from(sample_rate_hz) / 2.0;
        let fmax = self.resolved_fmax(sample_rate_hz);
        if !(self.fmin_hz >= 0.0 && self.fmin_hz < fmax && fmax <= nyquist) {
            return Err(Error::InvalidConfig(format!(
                "need 0 <= fmin ({}) < fmax ({fmax}) <= nyquist ({nyquist})",
                self.fmin_hz
            )));
        }
        if self.n_coeffs >= self.n_mels {
            return Err(Error::InvalidConfig(format!(
                "n_coeffs {} must be below n_mels {}",
                self.n_coeffs, self.n_mels
            )));
        }
        if self.log_floor <= 0.0 {
            return Err(Error::InvalidConfig("log_floor must be positive".into()));
        }
        Ok(())
    }
}

/// Per-frame 39-dimensional features: columns 0-12 MFCC, 13-25 deltas,
/// 26-38 double deltas, plus the center timestamp of every frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    matrix: Matrix,
    frame_times_s: Vec<f64>,
}

/// Feature dimensionality of the pipeline.
pub const N_FEATURES: usize = 39;

impl FeatureMatrix {
    pub fn new(matrix: Matrix, frame_times_s: Vec<f64>) -> Result<FeatureMatrix> {
        if matrix.n_cols() != N_FEATURES {
            return Err(Error::DimensionMismatch {
                expected: N_FEATURES,
                got: matrix.n_cols(),
            });
        }
        if matrix.n_rows() != frame_times_s.len() {
            return Err(Error::LengthMismatch {
                context: "feature rows vs frame times",
                left: matrix.n_rows(),
                right: frame_times_s.len(),
            });
        }
        if matrix.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("non-finite feature value".into()));
        }
        Ok(FeatureMatrix {
            matrix,
            frame_times_s,
        })
    }

    pub fn n_frames(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn frame_times_s(&self) -> &[f64] {
        &self.frame_times_s
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.matrix.row(i)
    }

    /// Column means as the fixed-size array used in track descriptors.
    pub fn feature_means(&self) -> [f64; N_FEATURES] {
        let means = self.matrix.column_means();
        let mut out = [0.0; N_FEATURES];
        out.copy_from_slice(&means);
        out
    }
}

/// MFCC per frame: Hann window, power spectrum, triangular mel filterbank,
/// floored natural log, orthonormal DCT-II, keep coefficients `1..=n_coeffs`.
pub fn compute_mfcc(clip: &AudioClip, spec: &FrameSpec, cfg: &MfccConfig) -> Result<Matrix> {
    spec.validate()?;
    cfg.validate(clip.sample_rate_hz())?;
    let n_frames = spec.n_frames(clip.len())?;

    let window: Vec<f64> = (0..spec.frame_len)
        .map(|n| 0.5 * (1.0 - (2.0 * core::f64::consts::PI * n as f64 / spec.frame_len as f64).cos()))
        .collect();
    let bank = mel::mel_filterbank(
        cfg.n_mels,
        spec.frame_len,
        clip.sample_rate_hz(),
        cfg.fmin_hz,
        cfg.resolved_fmax(clip.sample_rate_hz()),
    );
    let dct = mel::dct_matrix(cfg.n_mels);

    let samples = clip.samples();
    let mut out = Matrix::zeros(n_frames, cfg.n_coeffs);
    let mut re = vec![0.0; spec.frame_len];
    let mut im = vec![0.0; spec.frame_len];
    let mut log_mels = vec![0.0; cfg.n_mels];

    for f in 0..n_frames {
        let start = f * spec.hop;
        for (i, (s, w)) in samples[start..start + spec.frame_len]
            .iter()
            .zip(&window)
            .enumerate()
        {
            re[i] = s * w;
            im[i] = 0.0;
        }
        fft::fft_in_place(&mut re, &mut im);

        for (m, log_mel) in log_mels.iter_mut().enumerate() {
            let row = bank.row(m);
            let mut energy = 0.0;
            for (k, w) in row.iter().enumerate() {
                if *w > 0.0 {
                    energy += w * (re[k] * re[k] + im[k] * im[k]);
                }
            }
            *log_mel = energy.max(cfg.log_floor).ln();
        }

        let out_row = out.row_mut(f);
        for (c, slot) in out_row.iter_mut().enumerate() {
            // DCT row c + 1: coefficient 0 is discarded.
            *slot = dct
                .row(c + 1)
                .iter()
                .zip(&log_mels)
                .map(|(b, e)| b * e)
                .sum();
        }
    }
    Ok(out)
}

/// Append delta and double-delta columns computed by symmetric regression
/// over `window` neighbors with edge frames replicated:
/// `d_t = sum_k k*(c_{t+k} - c_{t-k}) / (2 * sum_k k^2)`.
pub fn append_deltas(mfcc: &Matrix, window: usize) -> Result<Matrix> {
    if mfcc.n_rows() == 0 {
        return Err(Error::EmptyInput("MFCC matrix"));
    }
    if window == 0 {
        return Err(Error::InvalidConfig("delta window must be >= 1".into()));
    }
    let deltas = regression_delta(mfcc, window);
    let double_deltas = regression_delta(&deltas, window);

    let n_cols = mfcc.n_cols();
    let mut values = Vec::with_capacity(mfcc.n_rows() * n_cols * 3);
    for r in 0..mfcc.n_rows() {
        values.extend_from_slice(mfcc.row(r));
        values.extend_from_slice(deltas.row(r));
        values.extend_from_slice(double_deltas.row(r));
    }
    Ok(Matrix::from_rows(values, n_cols * 3))
}

fn regression_delta(m: &Matrix, window: usize) -> Matrix {
    let n = m.n_rows() as isize;
    let denom: f64 = 2.0 * (1..=window).map(|k| (k * k) as f64).sum::<f64>();
    let mut out = Matrix::zeros(m.n_rows(), m.n_cols());
    for t in 0..m.n_rows() {
        for k in 1..=window {
            let fwd = m.row(((t + k) as isize).min(n - 1) as usize);
            let bwd = m.row((t as isize - k as isize).max(0) as usize);
            let row = out.row_mut(t);
            for (c, slot) in row.iter_mut().enumerate() {
                *slot += k as f64 * (fwd[c] - bwd[c]);
            }
        }
        for slot in out.row_mut(t) {
            *slot /= denom;
        }
    }
    out
}

/// Full front end for one clip: MFCC, deltas, double deltas, frame times.
pub fn extract_features(
    clip: &AudioClip,
    spec: &FrameSpec,
    cfg: &MfccConfig,
) -> Result<FeatureMatrix> {
    let mfcc = compute_mfcc(clip, spec, cfg)?;
    let full = append_deltas(&mfcc, 2)?;
    let times: Vec<f64> = (0..full.n_rows())
        .map(|i| spec.frame_center_s(i, clip.sample_rate_hz()))
        .collect();
    FeatureMatrix::new(full, times)
}
