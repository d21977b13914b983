//! Corpus ingestion: CSV manifests, PCM WAV decoding, and vocal-activity
//! annotation files. All paths inside a manifest are relative to the
//! manifest's own directory.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sic_core::{AudioClip, Isrc, Label, VocalActivityAnnotation};

use crate::error::{Error, Result};

/// The exact header every manifest must carry.
pub const MANIFEST_HEADER: &str = "isrc,label,split,audio_path,annotation_path";

/// Train/test membership of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

impl FromStr for Split {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Split, String> {
        if s.eq_ignore_ascii_case("train") {
            Ok(Split::Train)
        } else if s.eq_ignore_ascii_case("test") {
            Ok(Split::Test)
        } else {
            Err(format!("unknown split {s:?} (expected train or test)"))
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One manifest row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackRecord {
    pub isrc: Isrc,
    pub label: Label,
    pub split: Split,
    pub audio_path: PathBuf,
    pub annotation_path: Option<PathBuf>,
}

/// A loaded manifest plus the directory its relative paths resolve against.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusManifest {
    pub records: Vec<TrackRecord>,
    pub base_dir: PathBuf,
}

impl CorpusManifest {
    pub fn audio_path(&self, record: &TrackRecord) -> PathBuf {
        self.base_dir.join(&record.audio_path)
    }

    pub fn annotation_path(&self, record: &TrackRecord) -> Option<PathBuf> {
        record.annotation_path.as_ref().map(|p| self.base_dir.join(p))
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &TrackRecord> {
        self.records.iter().filter(move |r| r.split == split)
    }
}

/// Parse a manifest CSV. Labels and splits parse case-insensitively, an
/// empty annotation column means no annotation, and duplicate ISRCs are
/// rejected.
pub fn load_manifest(path: &Path) -> Result<CorpusManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut lines = text.lines().enumerate();

    let Some((_, header)) = lines.next() else {
        return Err(Error::Manifest {
            path: path.into(),
            row: 0,
            message: "empty file (missing header)".into(),
        });
    };
    if header.trim_end() != MANIFEST_HEADER {
        return Err(Error::Manifest {
            path: path.into(),
            row: 0,
            message: format!("bad header {header:?}, expected {MANIFEST_HEADER:?}"),
        });
    }

    let row_err = |row: usize, message: String| Error::Manifest {
        path: path.into(),
        row,
        message,
    };

    let mut records = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line_idx, line) in lines {
        let row = line_idx; // header was row 0, data rows are 1-based
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(row_err(row, format!("expected 5 fields, got {}", fields.len())));
        }
        let isrc = Isrc::new(fields[0].trim()).map_err(|e| row_err(row, e.to_string()))?;
        if !seen.insert(isrc.clone()) {
            return Err(row_err(row, format!("duplicate ISRC {isrc}")));
        }
        let label = Label::parse(fields[1].trim())
            .ok_or_else(|| row_err(row, format!("unknown label {:?}", fields[1].trim())))?;
        let split = Split::from_str(fields[2].trim()).map_err(|e| row_err(row, e))?;
        let audio = fields[3].trim();
        if audio.is_empty() {
            return Err(row_err(row, "empty audio_path".into()));
        }
        let annotation = fields[4].trim();
        records.push(TrackRecord {
            isrc,
            label,
            split,
            audio_path: PathBuf::from(audio),
            annotation_path: (!annotation.is_empty()).then(|| PathBuf::from(annotation)),
        });
    }
    Ok(CorpusManifest {
        records,
        base_dir,
    })
}

/// Write a manifest; `load_manifest(write_manifest(m)) == m` field for field.
pub fn write_manifest(manifest: &CorpusManifest, path: &Path) -> Result<()> {
    let mut out = String::from(MANIFEST_HEADER);
    out.push('\n');
    for r in &manifest.records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.isrc,
            r.label,
            r.split,
            r.audio_path.display(),
            r.annotation_path
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        ));
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Decode a PCM WAV (8/16/24-bit integer or 32-bit float, mono or stereo),
/// downmix stereo by channel mean, normalize to `[-1, 1]`, and resample to
/// `target_rate_hz` by linear interpolation.
pub fn load_audio(path: &Path, target_rate_hz: u32) -> Result<AudioClip> {
    let wav_err = |message: String| Error::Wav {
        path: path.into(),
        message,
    };
    let mut reader = hound::WavReader::open(path).map_err(|e| wav_err(e.to_string()))?;
    let spec = reader.spec();
    if !(1..=2).contains(&spec.channels) {
        return Err(wav_err(format!("{} channels unsupported", spec.channels)));
    }

    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from).map_err(|e| wav_err(e.to_string())))
            .collect::<Result<_>>()?,
        (hound::SampleFormat::Int, bits @ (8 | 16 | 24)) => {
            let scale = f64::from(1u32 << (bits - 1));
            reader
                .samples::<i32>()
                .map(|s| {
                    s.map(|v| f64::from(v) / scale)
                        .map_err(|e| wav_err(e.to_string()))
                })
                .collect::<Result<_>>()?
        }
        (format, bits) => {
            return Err(wav_err(format!("unsupported encoding: {bits}-bit {format:?}")));
        }
    };
    if interleaved.is_empty() {
        return Err(wav_err("zero-length audio".into()));
    }

    let clip = AudioClip::from_interleaved(&interleaved, spec.channels as usize, spec.sample_rate)?;
    Ok(clip.resampled(target_rate_hz)?)
}

/// Write a mono 16-bit PCM WAV (the synthetic corpus format).
pub fn write_wav_mono_16(path: &Path, samples: &[f64], sample_rate_hz: u32) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: sample_rate_hz,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let wav_err = |message: String| Error::Wav {
        path: path.into(),
        message,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| wav_err(e.to_string()))?;
    for &s in samples {
        let v = (s.clamp(-1.0, 1.0) * f64::from(i16::MAX)).round() as i16;
        writer.write_sample(v).map_err(|e| wav_err(e.to_string()))?;
    }
    writer.finalize().map_err(|e| wav_err(e.to_string()))?;
    Ok(())
}

/// Parse an annotation file: one voiced interval per line as
/// `start_seconds end_seconds`, whitespace separated. Intervals are sorted
/// and must not overlap; an empty file is a fully unvoiced track.
pub fn load_annotation(path: &Path) -> Result<VocalActivityAnnotation> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut intervals = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |tok: Option<&str>, what: &str| -> Result<f64> {
            let tok = tok.ok_or_else(|| Error::Annotation {
                path: path.into(),
                line: i + 1,
                message: format!("missing {what}"),
            })?;
            tok.parse::<f64>().map_err(|_| Error::Annotation {
                path: path.into(),
                line: i + 1,
                message: format!("non-numeric {what} {tok:?}"),
            })
        };
        let start = parse(parts.next(), "start")?;
        let end = parse(parts.next(), "end")?;
        if parts.next().is_some() {
            return Err(Error::Annotation {
                path: path.into(),
                line: i + 1,
                message: "expected exactly two fields".into(),
            });
        }
        intervals.push((start, end));
    }
    VocalActivityAnnotation::new(intervals).map_err(|e| Error::Annotation {
        path: path.into(),
        line: 0,
        message: e.to_string(),
    })
}

/// Write an annotation file in the two-column format.
pub fn write_annotation(path: &Path, annotation: &VocalActivityAnnotation) -> Result<()> {
    let mut out = String::new();
    for (start, end) in annotation.intervals() {
        out.push_str(&format!("{start:.6} {end:.6}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
