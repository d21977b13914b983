//! Frame-scale baseline: vector quantization of per-frame MFCC into a
//! learned codebook, then one first-order Markov model per class over the
//! codeword sequences. Classification picks the class with the higher
//! sequence log-likelihood.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

// Float supplies the f64 math methods in no_std builds; whenever std is
// elsewhere in the crate graph the inherent methods shadow it, so the
// import looks unused there.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{Isrc, Label};
use crate::matrix::Matrix;
use crate::rng::seeded_rng;
use crate::track_model::TrackPrediction;

/// Codebook and smoothing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VqmmConfig {
    /// Codebook size.
    pub k: usize,
    pub kmeans_iters: usize,
    pub seed: u64,
}

impl Default for VqmmConfig {
    fn default() -> VqmmConfig {
        VqmmConfig {
            k: 128,
            kmeans_iters: 50,
            seed: 0,
        }
    }
}

/// Add-one-smoothed first-order Markov model over codewords: every
/// probability is strictly positive and each transition row sums to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovChain {
    /// `k` initial-state probabilities.
    pub initial: Vec<f64>,
    /// Row-stochastic `k x k` transition matrix.
    pub transitions: Matrix,
}

impl MarkovChain {
    /// Estimate from codeword sequences with add-one smoothing:
    /// `P(j | i) = (c_ij + 1) / (sum_j c_ij + k)` and likewise for the
    /// initial distribution over sequence starts.
    pub fn estimate(sequences: &[&[usize]], k: usize) -> MarkovChain {
        let mut initial_counts = vec![0usize; k];
        let mut bigram_counts = vec![0usize; k * k];
        for seq in sequences {
            if let Some(&first) = seq.first() {
                initial_counts[first] += 1;
            }
            for pair in seq.windows(2) {
                bigram_counts[pair[0] * k + pair[1]] += 1;
            }
        }
        let n_seqs = sequences.len();
        let initial: Vec<f64> = initial_counts
            .iter()
            .map(|&c| (c + 1) as f64 / (n_seqs + k) as f64)
            .collect();
        let mut transitions = Matrix::zeros(k, k);
        for i in 0..k {
            let row_total: usize = bigram_counts[i * k..(i + 1) * k].iter().sum();
            for j in 0..k {
                let p = (bigram_counts[i * k + j] + 1) as f64 / (row_total + k) as f64;
                transitions.set(i, j, p);
            }
        }
        MarkovChain {
            initial,
            transitions,
        }
    }

    /// Log-likelihood of a codeword sequence:
    /// `ln P0(s_0) + sum_i ln P(s_{i+1} | s_i)`. Smoothing keeps this finite
    /// for any sequence over the codebook.
    pub fn log_likelihood(&self, sequence: &[usize]) -> f64 {
        let Some(&first) = sequence.first() else {
            return 0.0;
        };
        let mut ll = self.initial[first].ln();
        for pair in sequence.windows(2) {
            ll += self.transitions.get(pair[0], pair[1]).ln();
        }
        ll
    }
}

/// A trained VQMM baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqmmModel {
    /// `k x dim` centroids.
    pub codebook: Matrix,
    pub song: MarkovChain,
    pub instrumental: MarkovChain,
    pub config: VqmmConfig,
}

impl VqmmModel {
    pub fn k(&self) -> usize {
        self.codebook.n_rows()
    }
}

/// Train the codebook on all pooled training frames and one Markov model per
/// class over the resulting codeword sequences.
///
/// Each track is a `frames x dim` MFCC matrix (no deltas) with at least two
/// frames.
pub fn train_vqmm(tracks: &[(Matrix, Label)], cfg: &VqmmConfig) -> Result<VqmmModel> {
    if tracks.is_empty() {
        return Err(Error::EmptyInput("VQMM training set"));
    }
    if tracks.iter().all(|(_, l)| *l == Label::Song) {
        return Err(Error::SingleClass("Song"));
    }
    if tracks.iter().all(|(_, l)| *l == Label::Instrumental) {
        return Err(Error::SingleClass("Instrumental"));
    }
    if cfg.k < 2 {
        return Err(Error::InvalidConfig("codebook size must be >= 2".into()));
    }
    let dim = tracks[0].0.n_cols();
    for (i, (m, _)) in tracks.iter().enumerate() {
        if m.n_rows() < 2 {
            return Err(Error::InvalidConfig(format!(
                "track {i} has fewer than 2 frames"
            )));
        }
        if m.n_cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.n_cols(),
            });
        }
    }

    let pooled = Matrix::vstack(&tracks.iter().map(|(m, _)| m).collect::<Vec<_>>());
    if pooled.n_rows() < cfg.k {
        return Err(Error::DegenerateFit(format!(
            "{} pooled frames cannot fill a codebook of {}",
            pooled.n_rows(),
            cfg.k
        )));
    }
    let codebook = kmeans(&pooled, cfg.k, cfg.kmeans_iters, cfg.seed);

    let mut song_seqs: Vec<Vec<usize>> = Vec::new();
    let mut instr_seqs: Vec<Vec<usize>> = Vec::new();
    for (m, label) in tracks {
        let seq = encode(&codebook, m);
        match label {
            Label::Song => song_seqs.push(seq),
            Label::Instrumental => instr_seqs.push(seq),
        }
    }
    let song_refs: Vec<&[usize]> = song_seqs.iter().map(Vec::as_slice).collect();
    let instr_refs: Vec<&[usize]> = instr_seqs.iter().map(Vec::as_slice).collect();

    Ok(VqmmModel {
        song: MarkovChain::estimate(&song_refs, cfg.k),
        instrumental: MarkovChain::estimate(&instr_refs, cfg.k),
        codebook,
        config: *cfg,
    })
}

/// Quantize a track's frames to codeword indices: nearest centroid by
/// Euclidean distance, lowest index on ties.
pub fn encode(codebook: &Matrix, frames: &Matrix) -> Vec<usize> {
    frames
        .rows()
        .map(|frame| nearest_centroid(codebook, frame))
        .collect()
}

/// Classify tracks by comparing per-class sequence log-likelihoods. The
/// margin is `ll_instrumental - ll_song`; a tie resolves to Song.
pub fn predict_vqmm(
    model: &VqmmModel,
    isrcs: &[Isrc],
    tracks: &[Matrix],
) -> Result<Vec<TrackPrediction>> {
    if isrcs.len() != tracks.len() {
        return Err(Error::LengthMismatch {
            context: "VQMM isrcs vs tracks",
            left: isrcs.len(),
            right: tracks.len(),
        });
    }
    tracks
        .iter()
        .zip(isrcs)
        .map(|(m, isrc)| {
            if m.n_cols() != model.codebook.n_cols() {
                return Err(Error::DimensionMismatch {
                    expected: model.codebook.n_cols(),
                    got: m.n_cols(),
                });
            }
            let seq = encode(&model.codebook, m);
            let ll_song = model.song.log_likelihood(&seq);
            let ll_instr = model.instrumental.log_likelihood(&seq);
            let margin = ll_instr - ll_song;
            let predicted_label = if margin > 0.0 {
                Label::Instrumental
            } else {
                Label::Song
            };
            Ok(TrackPrediction {
                isrc: isrc.clone(),
                predicted_label,
                margin,
                scores: (-margin, margin),
            })
        })
        .collect()
}

fn nearest_centroid(codebook: &Matrix, point: &[f64]) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, centroid) in codebook.rows().enumerate() {
        let dist: f64 = centroid
            .iter()
            .zip(point)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if dist < best_dist {
            best = i;
            best_dist = dist;
        }
    }
    best
}

/// Lloyd's algorithm with k-means++ seeding and a fixed iteration budget
/// (early exit when assignments stop changing). An emptied cluster is
/// reseeded from the point currently farthest from its own centroid.
fn kmeans(points: &Matrix, k: usize, iterations: usize, seed: u64) -> Matrix {
    let n = points.n_rows();
    let dim = points.n_cols();
    let mut rng = seeded_rng(seed, "baseline/vqmm/kmeans");

    // k-means++ seeding
    let mut centroids = Matrix::zeros(k, dim);
    let first = rng.random_range(0..n);
    centroids.row_mut(0).copy_from_slice(points.row(first));
    let mut min_sq = vec![f64::INFINITY; n];
    for c in 1..k {
        for (i, point) in points.rows().enumerate() {
            let d: f64 = centroids
                .row(c - 1)
                .iter()
                .zip(point)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d < min_sq[i] {
                min_sq[i] = d;
            }
        }
        let total: f64 = min_sq.iter().sum();
        let chosen = if total > 0.0 {
            let mut target = rng.random_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &d) in min_sq.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            // all points coincide with existing centroids
            rng.random_range(0..n)
        };
        centroids.row_mut(c).copy_from_slice(points.row(chosen));
    }

    let mut assignment = vec![usize::MAX; n];
    for _ in 0..iterations {
        let mut changed = false;
        for (i, point) in points.rows().enumerate() {
            let best = nearest_centroid(&centroids, point);
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }

        let mut sums = Matrix::zeros(k, dim);
        let mut counts = vec![0usize; k];
        for (i, point) in points.rows().enumerate() {
            let c = assignment[i];
            counts[c] += 1;
            for (s, v) in sums.row_mut(c).iter_mut().zip(point) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                let row = sums.row(c).to_vec();
                for (slot, v) in centroids.row_mut(c).iter_mut().zip(row) {
                    *slot = v * inv;
                }
            }
        }
        // reseed empty clusters from the points farthest from their centroid
        let mut taken = vec![false; n];
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let farthest = (0..n)
                .filter(|&i| !taken[i])
                .max_by(|&a, &b| {
                    let da = sq_dist(points.row(a), centroids.row(assignment[a]));
                    let db = sq_dist(points.row(b), centroids.row(assignment[b]));
                    da.total_cmp(&db)
                })
                .unwrap_or(0);
            taken[farthest] = true;
            let row = points.row(farthest).to_vec();
            centroids.row_mut(c).copy_from_slice(&row);
        }
    }
    centroids
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
