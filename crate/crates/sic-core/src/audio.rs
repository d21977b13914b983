//! Decoded audio clips and sample-rate conversion.

use alloc::format;
use alloc::vec::Vec;


// Float supplies the f64 math methods in no_std builds; whenever std is
// elsewhere in the crate graph the inherent methods shadow it, so the
// import looks unused there.
#[allow(unused_imports)]
use num_traits::Float;
use crate::error::{Error, Result};

/// The canonical processing rate for the whole pipeline. At this rate the
/// default 2048-sample analysis frame spans ~92.9 ms.
pub const CANONICAL_RATE_HZ: u32 = 22_050;

/// A decoded mono PCM signal.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl AudioClip {
    /// Wrap mono samples, validating the clip invariants: a positive rate,
    /// at least one sample, and every amplitude finite.
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<AudioClip> {
        if sample_rate_hz == 0 {
            return Err(Error::InvalidAudio("sample rate must be positive".into()));
        }
        if samples.is_empty() {
            return Err(Error::InvalidAudio("zero-length audio".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidAudio(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(AudioClip {
            samples,
            sample_rate_hz,
        })
    }

    /// Downmix interleaved multichannel samples by per-frame channel mean.
    pub fn from_interleaved(
        interleaved: &[f64],
        channels: usize,
        sample_rate_hz: u32,
    ) -> Result<AudioClip> {
        if channels == 0 {
            return Err(Error::InvalidAudio("zero channels".into()));
        }
        if interleaved.len() % channels != 0 {
            return Err(Error::InvalidAudio(format!(
                "truncated interleaved data: {} samples over {} channels",
                interleaved.len(),
                channels
            )));
        }
        let mono: Vec<f64> = interleaved
            .chunks_exact(channels)
            .map(|frame| frame.iter().sum::<f64>() / channels as f64)
            .collect();
        AudioClip::new(mono, sample_rate_hz)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// Resample to `target_rate_hz` by linear interpolation.
    ///
    /// Adequate for mel-band feature content; callers wanting higher fidelity
    /// can swap in a windowed-sinc kernel without touching this contract.
    /// An identity target returns the clip bit-for-bit unchanged, and the
    /// output duration matches the input within one output sample period.
    pub fn resampled(&self, target_rate_hz: u32) -> Result<AudioClip> {
        if target_rate_hz == 0 {
            return Err(Error::InvalidAudio("target rate must be positive".into()));
        }
        if target_rate_hz == self.sample_rate_hz {
            return Ok(self.clone());
        }
        let ratio = f64::from(target_rate_hz) / f64::from(self.sample_rate_hz);
        let out_len = ((self.samples.len() as f64) * ratio).round().max(1.0) as usize;
        let step = f64::from(self.sample_rate_hz) / f64::from(target_rate_hz);
        let last = self.samples.len() - 1;
        let out: Vec<f64> = (0..out_len)
            .map(|i| {
                let x = i as f64 * step;
                let i0 = (x.floor() as usize).min(last);
                let i1 = (i0 + 1).min(last);
                let frac = x - i0 as f64;
                self.samples[i0] * (1.0 - frac) + self.samples[i1] * frac
            })
            .collect();
        AudioClip::new(out, target_rate_hz)
    }
}
