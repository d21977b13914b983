//! Seeded synthetic corpus: harmonic instrument beds, gated mid-band leads,
//! and (for Songs) a melodic vibrato "voice", plus matching annotations and
//! a manifest.
//!
//! The two classes are built to overlap in long-term spectral statistics so
//! that track-scale features cannot separate them cleanly, while frame-scale
//! structure still can:
//!
//! - every track is a bed of 3-6 steady harmonics under slow amplitude
//!   envelopes plus filtered noise, often with a resonant mid-band pad;
//! - most Instrumentals add a lead in the vocal register, gated on random
//!   intervals with the same duty cycle a voice would have: tremolo at vocal
//!   rates, sometimes formant-like coloring, held notes, and at most the
//!   shallow pitch wobble of an aerophone;
//! - Songs add the voice on annotated intervals covering 30-70% of the
//!   track: a two-formant harmonic source singing a note sequence with
//!   5-7 Hz pitch vibrato of +/-30 cents.
//!
//! What reliably separates a voice from a mimic lead is frame-local: deep
//! vibrato and note-to-note movement. Everything slower-moving (band
//! occupancy, spectral tilt, energy duty cycle) is deliberately shared.
//! Every quantity is drawn from an RNG keyed by `(seed, ISRC)`, so a seed
//! pins the corpus byte for byte.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sic_core::rng::seeded_rng;
use sic_core::{Isrc, Label, VocalActivityAnnotation};

use crate::corpus::{
    write_annotation, write_manifest, write_wav_mono_16, CorpusManifest, Split, TrackRecord,
};
use crate::error::{Error, Result};

/// Generator parameters. Test-side counts of zero produce a train-only
/// corpus (the shape k-fold experiments want).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SynthConfig {
    pub n_songs: usize,
    pub n_instrumentals: usize,
    pub n_test_songs: usize,
    pub n_test_instrumentals: usize,
    pub duration_s: f64,
    pub seed: u64,
    /// Scale on the vocal source. 1.0 gives a clearly audible voice; lower
    /// values bury it in the bed to make the task noisier.
    pub voice_gain: f64,
    pub sample_rate_hz: u32,
}

impl Default for SynthConfig {
    fn default() -> SynthConfig {
        SynthConfig {
            n_songs: 0,
            n_instrumentals: 0,
            n_test_songs: 0,
            n_test_instrumentals: 0,
            duration_s: 8.0,
            seed: 0,
            voice_gain: 1.0,
            sample_rate_hz: sic_core::audio::CANONICAL_RATE_HZ,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.duration_s < 5.0 {
            return Err(Error::Config(format!(
                "duration_s must be >= 5, got {}",
                self.duration_s
            )));
        }
        if self.voice_gain < 0.0 {
            return Err(Error::Config("voice_gain must be >= 0".into()));
        }
        if self.sample_rate_hz == 0 {
            return Err(Error::Config("sample_rate_hz must be positive".into()));
        }
        Ok(())
    }
}

/// Write the corpus under `out_dir` (`audio/`, `ann/`, `manifest.csv`) and
/// return the manifest.
pub fn generate_synthetic_corpus(cfg: &SynthConfig, out_dir: &Path) -> Result<CorpusManifest> {
    cfg.validate()?;
    let audio_dir = out_dir.join("audio");
    let ann_dir = out_dir.join("ann");
    fs::create_dir_all(&audio_dir).map_err(|e| Error::io(&audio_dir, e))?;
    fs::create_dir_all(&ann_dir).map_err(|e| Error::io(&ann_dir, e))?;

    let plan = [
        (Label::Song, Split::Train, cfg.n_songs),
        (Label::Instrumental, Split::Train, cfg.n_instrumentals),
        (Label::Song, Split::Test, cfg.n_test_songs),
        (Label::Instrumental, Split::Test, cfg.n_test_instrumentals),
    ];
    let mut records = Vec::new();
    let mut serial = 0usize;
    for (label, split, count) in plan {
        for _ in 0..count {
            serial += 1;
            let isrc = Isrc::new(&format!("ZZSYN26{serial:05}"))
                .expect("synthetic ISRCs are well-formed by construction");
            let mut rng = seeded_rng(cfg.seed, &format!("synth/{isrc}"));

            let (samples, annotation) = match label {
                Label::Instrumental => (render_instrumental(cfg, &mut rng), None),
                Label::Song => {
                    let (samples, ann) = render_song(cfg, &mut rng);
                    (samples, Some(ann))
                }
            };

            let audio_rel = PathBuf::from(format!("audio/{isrc}.wav"));
            write_wav_mono_16(&out_dir.join(&audio_rel), &samples, cfg.sample_rate_hz)?;
            let annotation_rel = match &annotation {
                Some(ann) => {
                    let rel = PathBuf::from(format!("ann/{isrc}.ann"));
                    write_annotation(&out_dir.join(&rel), ann)?;
                    Some(rel)
                }
                None => None,
            };
            records.push(TrackRecord {
                isrc,
                label,
                split,
                audio_path: audio_rel,
                annotation_path: annotation_rel,
            });
        }
    }

    let manifest = CorpusManifest {
        records,
        base_dir: out_dir.to_path_buf(),
    };
    write_manifest(&manifest, &out_dir.join("manifest.csv"))?;
    Ok(manifest)
}

const VOICE_BAND_LIMIT_HZ: f64 = 3500.0;
const VIBRATO_DEPTH_CENTS: f64 = 30.0;
/// Raised-cosine attack/release at gate edges.
const GATE_EDGE_S: f64 = 0.05;

fn render_instrumental(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = (cfg.duration_s * f64::from(cfg.sample_rate_hz)).round() as usize;
    let mut mix = render_bed(cfg, rng, n);
    // most instrumentals carry a gated lead in the vocal register so the
    // classes share their energy duty cycle; a minority of those leads also
    // wobble like an aerophone
    let tier: f64 = rng.random_range(0.0..1.0);
    if tier < 0.6 {
        let vibrato_cents = if tier < 0.1 {
            rng.random_range(3.0..8.0)
        } else {
            0.0
        };
        let gate = draw_gate_intervals(rng, cfg.duration_s);
        let lead = Lead::draw_instrument(rng, vibrato_cents);
        render_lead(&mut mix, &lead, &gate, 1.0, cfg.sample_rate_hz);
    }
    normalize_peak(&mut mix);
    mix
}

fn render_song(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> (Vec<f64>, VocalActivityAnnotation) {
    let n = (cfg.duration_s * f64::from(cfg.sample_rate_hz)).round() as usize;
    let mut mix = render_bed(cfg, rng, n);
    let annotation = draw_gate_intervals(rng, cfg.duration_s);
    let voice = Lead::draw_voice(rng, cfg.duration_s);
    render_lead(&mut mix, &voice, &annotation, cfg.voice_gain, cfg.sample_rate_hz);
    normalize_peak(&mut mix);
    (mix, annotation)
}

/// The shared instrument bed: steady harmonics under slow amplitude LFOs
/// plus one-pole low-passed noise, often with a resonant mid-band pad.
/// Timbre parameters vary widely per track so the two classes overlap in
/// long-term spectral shape.
fn render_bed(cfg: &SynthConfig, rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let sr = f64::from(cfg.sample_rate_hz);
    let n_partials = rng.random_range(3..=6);
    let f0: f64 = rng.random_range(70.0..300.0);
    let rolloff: f64 = rng.random_range(0.5..0.9);
    let nyquist = sr / 2.0;

    struct Partial {
        freq: f64,
        amp: f64,
        phase: f64,
        lfo_freq: f64,
        lfo_depth: f64,
        lfo_phase: f64,
    }
    let draw_partial = |freq: f64, amp: f64, rng: &mut ChaCha8Rng| Partial {
        freq,
        amp,
        phase: rng.random_range(0.0..2.0 * PI),
        lfo_freq: rng.random_range(0.05..0.4),
        lfo_depth: rng.random_range(0.2..0.45),
        lfo_phase: rng.random_range(0.0..2.0 * PI),
    };

    let mut partials: Vec<Partial> = Vec::new();
    for h in 1..=n_partials {
        let freq = f0 * h as f64;
        if freq < nyquist * 0.9 {
            let amp = rolloff.powi(h as i32 - 1);
            partials.push(draw_partial(freq, amp, rng));
        }
    }

    // resonant pad: upper partials of the same fundamental under one or two
    // gaussian spectral bumps
    if rng.random_range(0.0..1.0) < 0.6 {
        let mut bumps = vec![(
            rng.random_range(300.0..2600.0),
            rng.random_range(150.0..500.0),
            rng.random_range(0.3..0.65),
        )];
        if rng.random_range(0.0..1.0) < 0.3 {
            bumps.push((
                rng.random_range(300.0..2600.0),
                rng.random_range(150.0..500.0),
                rng.random_range(0.25..0.55),
            ));
        }
        let max_h = (VOICE_BAND_LIMIT_HZ / f0) as usize;
        for h in 1..=max_h {
            let freq = f0 * h as f64;
            let amp: f64 = bumps
                .iter()
                .map(|&(center, width, gain): &(f64, f64, f64)| {
                    let z = (freq - center) / width;
                    gain * (-z * z).exp()
                })
                .sum();
            if amp >= 0.02 {
                partials.push(draw_partial(freq, amp, rng));
            }
        }
    }

    let noise_level = rng.random_range(0.05..0.15);
    let noise_cutoff = rng.random_range(500.0..1800.0);
    let alpha = 1.0 - (-2.0 * PI * noise_cutoff / sr).exp();

    let mut out = vec![0.0; n];
    let mut lp = 0.0;
    for (i, slot) in out.iter_mut().enumerate() {
        let t = i as f64 / sr;
        let mut acc = 0.0;
        for p in &partials {
            let envelope = 1.0 + p.lfo_depth * (2.0 * PI * p.lfo_freq * t + p.lfo_phase).sin();
            acc += p.amp * envelope * (2.0 * PI * p.freq * t + p.phase).sin();
        }
        let white: f64 = rng.random_range(-1.0..1.0);
        lp += alpha * (white - lp);
        *slot = acc + noise_level * lp;
    }
    // pin the bed to a fixed RMS so lead and voice levels mean the same
    // thing on every track
    let rms = (out.iter().map(|s| s * s).sum::<f64>() / n as f64).sqrt();
    if rms > 0.0 {
        let gain = 0.25 / rms;
        for s in &mut out {
            *s *= gain;
        }
    }
    out
}

/// How a lead's partial amplitudes follow frequency.
enum Spectrum {
    /// Two formant peaks: the vocal signature.
    Formants { f1: f64, f2: f64 },
    /// Geometric rolloff, optionally colored by resonant bumps.
    Rolloff {
        rolloff: f64,
        bumps: Vec<(f64, f64, f64)>,
    },
}

impl Spectrum {
    fn amp(&self, freq: f64, harmonic: usize) -> f64 {
        let bump = |center: f64, width: f64, weight: f64| {
            let z = (freq - center) / width;
            weight * (-z * z).exp()
        };
        match self {
            Spectrum::Formants { f1, f2 } => {
                bump(*f1, 220.0, 1.0) + bump(*f2, 420.0, 0.7) + 0.08
            }
            Spectrum::Rolloff { rolloff, bumps } => {
                let mut amp = rolloff.powi(harmonic as i32 - 1);
                for &(center, width, gain) in bumps {
                    amp += bump(center, width, gain);
                }
                amp
            }
        }
    }
}

/// A gated harmonic source in the vocal register: the voice (melodic, deep
/// vibrato, formant spectrum) or an instrument lead (held notes, tremolo,
/// at most shallow vibrato).
struct Lead {
    /// `(start_s, f0_hz)` note changes, sorted by start.
    notes: Vec<(f64, f64)>,
    spectrum: Spectrum,
    vibrato_depth_cents: f64,
    vibrato_rate: f64,
    vibrato_phase: f64,
    tremolo: Option<(f64, f64, f64)>,
    /// Gated 2-3.8 kHz noise level: vocal aspiration, or the breath noise
    /// of a wind instrument.
    breath_noise: Option<f64>,
    level: f64,
}

impl Lead {
    /// The singing-voice stand-in: a note every 0.3-0.8 s stepping up to a
    /// fifth within the vocal octave, +/-30 cent vibrato at 5-7 Hz, and a
    /// two-formant spectrum.
    fn draw_voice(rng: &mut ChaCha8Rng, duration_s: f64) -> Lead {
        let mut notes = Vec::new();
        let mut t = 0.0;
        let mut semitone: f64 = rng.random_range(0.0..12.0);
        while t < duration_s {
            notes.push((t, 185.0 * (semitone / 12.0).exp2()));
            t += rng.random_range(0.3..0.8);
            let step: f64 = rng.random_range(-5.0..5.0);
            semitone = (semitone + step).clamp(0.0, 12.0);
        }
        Lead {
            notes,
            spectrum: Spectrum::Formants {
                f1: rng.random_range(450.0..750.0),
                f2: rng.random_range(1500.0..2400.0),
            },
            vibrato_depth_cents: VIBRATO_DEPTH_CENTS,
            vibrato_rate: rng.random_range(5.0..7.0),
            vibrato_phase: rng.random_range(0.0..2.0 * PI),
            tremolo: None,
            breath_noise: Some(rng.random_range(0.10..0.18)),
            level: rng.random_range(0.58..0.88),
        }
    }

    /// An instrument lead holding one to three notes with tremolo, an
    /// optional formant-like coloring, and `vibrato_cents` of pitch wobble
    /// (zero for most instruments, a few cents for aerophone-like ones).
    fn draw_instrument(rng: &mut ChaCha8Rng, vibrato_cents: f64) -> Lead {
        let n_notes = rng.random_range(1..=3);
        let notes = (0..n_notes)
            .map(|i| {
                (
                    i as f64 * rng.random_range(2.0..4.0),
                    rng.random_range(185.0..370.0),
                )
            })
            .collect();
        let mut bumps = Vec::new();
        if rng.random_range(0.0..1.0) < 0.5 {
            bumps.push((
                rng.random_range(500.0..900.0),
                220.0,
                rng.random_range(0.4..0.9),
            ));
        }
        if rng.random_range(0.0..1.0) < 0.25 {
            bumps.push((
                rng.random_range(1500.0..2400.0),
                420.0,
                rng.random_range(0.3..0.7),
            ));
        }
        let breath_noise = if bumps.is_empty() && rng.random_range(0.0..1.0) < 0.6 {
            Some(rng.random_range(0.10..0.18))
        } else {
            None
        };
        let spectrum = Spectrum::Rolloff {
            rolloff: rng.random_range(0.6..0.8),
            bumps,
        };
        Lead {
            notes,
            spectrum,
            vibrato_depth_cents: vibrato_cents,
            vibrato_rate: rng.random_range(4.0..7.0),
            vibrato_phase: rng.random_range(0.0..2.0 * PI),
            tremolo: Some((
                rng.random_range(0.4..0.8),
                rng.random_range(4.0..7.0),
                rng.random_range(0.0..2.0 * PI),
            )),
            breath_noise,
            level: rng.random_range(0.55..0.8),
        }
    }
}

fn render_lead(
    mix: &mut [f64],
    lead: &Lead,
    gate: &VocalActivityAnnotation,
    gain: f64,
    sample_rate_hz: u32,
) {
    if gain == 0.0 {
        return;
    }
    let sr = f64::from(sample_rate_hz);
    let mut phase = 0.0;
    let mut note_idx = 0usize;
    let mut amps: Vec<f64> = Vec::new();
    let mut current_f0 = 0.0;
    // breath noise: white noise band-passed to roughly 2-3.8 kHz as the
    // difference of two one-pole low-passes
    let alpha_hi = 1.0 - (-2.0 * PI * 3800.0 / sr).exp();
    let alpha_lo = 1.0 - (-2.0 * PI * 2000.0 / sr).exp();
    let mut lp_hi = 0.0;
    let mut lp_lo = 0.0;
    let mut noise_rng = rand_chacha::ChaCha8Rng::seed_from_u64(
        (lead.level.to_bits() ^ lead.vibrato_phase.to_bits()).rotate_left(17),
    );
    for (i, slot) in mix.iter_mut().enumerate() {
        let t = i as f64 / sr;
        while note_idx + 1 < lead.notes.len() && lead.notes[note_idx + 1].0 <= t {
            note_idx += 1;
        }
        let f0 = lead.notes[note_idx].1;
        if f0 != current_f0 {
            current_f0 = f0;
            let n_partials = (VOICE_BAND_LIMIT_HZ / f0) as usize;
            amps = (1..=n_partials)
                .map(|h| lead.spectrum.amp(f0 * h as f64, h))
                .collect();
        }

        let cents = lead.vibrato_depth_cents
            * (2.0 * PI * lead.vibrato_rate * t + lead.vibrato_phase).sin();
        phase += 2.0 * PI * f0 * (cents / 1200.0).exp2() / sr;

        let envelope = gate_envelope(gate, t);
        if envelope == 0.0 {
            continue;
        }
        let tremolo = match lead.tremolo {
            Some((depth, rate, tphase)) => 1.0 + depth * (2.0 * PI * rate * t + tphase).sin(),
            None => 1.0,
        };
        let mut acc = 0.0;
        for (h, amp) in amps.iter().enumerate() {
            acc += amp * (phase * (h + 1) as f64).sin();
        }
        let mut sample = lead.level * tremolo * acc;
        if let Some(level) = lead.breath_noise {
            let white: f64 = noise_rng.random_range(-1.0..1.0);
            lp_hi += alpha_hi * (white - lp_hi);
            lp_lo += alpha_lo * (white - lp_lo);
            sample += level * (lp_hi - lp_lo) * 8.0;
        }
        *slot += gain * envelope * sample;
    }
}

/// 1.0 well inside a gate interval, raised-cosine ramps at the edges, 0.0
/// outside.
fn gate_envelope(gate: &VocalActivityAnnotation, t: f64) -> f64 {
    for &(start, end) in gate.intervals() {
        if t < start || t >= end {
            continue;
        }
        let ramp = |x: f64| 0.5 * (1.0 - (PI * (x / GATE_EDGE_S).min(1.0)).cos());
        return ramp(t - start).min(ramp(end - t)).min(1.0);
    }
    0.0
}

/// Random active intervals totalling 35-65% of the track: 1-3 intervals with
/// randomly proportioned lengths, separated by randomly proportioned gaps.
fn draw_gate_intervals(rng: &mut ChaCha8Rng, duration_s: f64) -> VocalActivityAnnotation {
    let active_fraction = rng.random_range(0.35..0.65);
    let active_total = active_fraction * duration_s;
    let n_intervals = rng.random_range(1..=3);

    let proportions = |rng: &mut ChaCha8Rng, n: usize| -> Vec<f64> {
        let draws: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.0)).collect();
        let total: f64 = draws.iter().sum();
        draws.into_iter().map(|d| d / total).collect()
    };
    let interval_lens: Vec<f64> = proportions(rng, n_intervals)
        .into_iter()
        .map(|p| p * active_total)
        .collect();
    let gap_lens: Vec<f64> = proportions(rng, n_intervals + 1)
        .into_iter()
        .map(|p| p * (duration_s - active_total))
        .collect();

    let mut intervals = Vec::with_capacity(n_intervals);
    let mut cursor = 0.0;
    for (gap, len) in gap_lens.iter().zip(&interval_lens) {
        cursor += gap;
        intervals.push((cursor, cursor + len));
        cursor += len;
    }
    VocalActivityAnnotation::new(intervals)
        .expect("sequentially placed intervals are sorted and disjoint")
}

fn normalize_peak(samples: &mut [f64]) {
    let peak = samples.iter().fold(0.0f64, |m, &s| m.max(s.abs()));
    if peak > 0.0 {
        let gain = 0.9 / peak;
        for s in samples.iter_mut() {
            *s *= gain;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load_manifest;
    use tempfile::tempdir;

    fn tiny_cfg(seed: u64) -> SynthConfig {
        SynthConfig {
            n_songs: 2,
            n_instrumentals: 1,
            duration_s: 5.0,
            seed,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn corpus_shape_and_annotations() {
        let dir = tempdir().unwrap();
        let manifest = generate_synthetic_corpus(&tiny_cfg(1), dir.path()).unwrap();
        assert_eq!(manifest.records.len(), 3);
        for record in &manifest.records {
            assert!(record.isrc.as_str().starts_with("ZZSYN"));
            assert!(manifest.audio_path(record).exists());
            match record.label {
                Label::Song => {
                    let ann_path = manifest
                        .annotation_path(record)
                        .expect("songs are annotated");
                    let ann = crate::corpus::load_annotation(&ann_path).unwrap();
                    assert!(!ann.intervals().is_empty());
                    let voiced = ann.voiced_duration_s();
                    assert!(
                        (0.3..=0.7).contains(&(voiced / 5.0)),
                        "voiced fraction {}",
                        voiced / 5.0
                    );
                    let last_end = ann.intervals().last().unwrap().1;
                    assert!(last_end <= 5.0 + 1e-9);
                }
                Label::Instrumental => assert!(record.annotation_path.is_none()),
            }
        }
        let reloaded = load_manifest(&dir.path().join("manifest.csv")).unwrap();
        assert_eq!(reloaded.records, manifest.records);
    }

    #[test]
    fn identical_seeds_give_identical_bytes() {
        let a = tempdir().unwrap();
        let b = tempdir().unwrap();
        generate_synthetic_corpus(&tiny_cfg(7), a.path()).unwrap();
        generate_synthetic_corpus(&tiny_cfg(7), b.path()).unwrap();
        for entry in ["manifest.csv", "audio/ZZSYN2600001.wav", "ann/ZZSYN2600001.ann"] {
            let left = fs::read(a.path().join(entry)).unwrap();
            let right = fs::read(b.path().join(entry)).unwrap();
            assert_eq!(left, right, "{entry} differs between identical seeds");
        }
        // and a different seed changes the audio
        let c = tempdir().unwrap();
        generate_synthetic_corpus(&tiny_cfg(8), c.path()).unwrap();
        assert_ne!(
            fs::read(a.path().join("audio/ZZSYN2600001.wav")).unwrap(),
            fs::read(c.path().join("audio/ZZSYN2600001.wav")).unwrap()
        );
    }

    #[test]
    fn zero_songs_means_no_annotation_files() {
        let dir = tempdir().unwrap();
        let cfg = SynthConfig {
            n_songs: 0,
            n_instrumentals: 1,
            duration_s: 5.0,
            ..SynthConfig::default()
        };
        let manifest = generate_synthetic_corpus(&cfg, dir.path()).unwrap();
        assert_eq!(manifest.records.len(), 1);
        assert!(manifest.records[0].annotation_path.is_none());
        assert_eq!(fs::read_dir(dir.path().join("ann")).unwrap().count(), 0);
    }

    #[test]
    fn split_counts_are_respected() {
        let dir = tempdir().unwrap();
        let cfg = SynthConfig {
            n_songs: 2,
            n_instrumentals: 1,
            n_test_songs: 3,
            n_test_instrumentals: 2,
            duration_s: 5.0,
            ..SynthConfig::default()
        };
        let manifest = generate_synthetic_corpus(&cfg, dir.path()).unwrap();
        let count = |split, label| {
            manifest
                .records
                .iter()
                .filter(|r| r.split == split && r.label == label)
                .count()
        };
        assert_eq!(count(Split::Train, Label::Song), 2);
        assert_eq!(count(Split::Train, Label::Instrumental), 1);
        assert_eq!(count(Split::Test, Label::Song), 3);
        assert_eq!(count(Split::Test, Label::Instrumental), 2);
    }

    #[test]
    fn short_duration_is_rejected() {
        let cfg = SynthConfig {
            duration_s: 3.0,
            ..SynthConfig::default()
        };
        assert!(generate_synthetic_corpus(&cfg, Path::new("/nonexistent")).is_err());
    }
}
