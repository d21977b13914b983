//! Track-scale baseline: a RANSAC-fit affine hyperplane over per-track mean
//! MFCC vectors. Songs target -1, Instrumentals +1; classification follows
//! the sign of the hyperplane output.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index::sample as index_sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{Isrc, Label};
use crate::matrix::Matrix;
use crate::rng::seeded_rng;
use crate::track_model::TrackPrediction;

/// RANSAC parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub iterations: usize,
    pub inlier_threshold: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> GaConfig {
        GaConfig {
            iterations: 100,
            inlier_threshold: 0.5,
            seed: 0,
        }
    }
}

/// The fitted hyperplane: feature weights followed by a bias term, mapping a
/// mean-MFCC vector to a real score (positive side is Instrumental).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RansacModel {
    /// `dim + 1` coefficients, bias last.
    pub weights: Vec<f64>,
    pub inlier_threshold: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl RansacModel {
    pub fn dim(&self) -> usize {
        self.weights.len() - 1
    }

    /// Hyperplane output for one feature vector.
    pub fn score(&self, features: &[f64]) -> f64 {
        let (w, bias) = self.weights.split_at(self.dim());
        w.iter().zip(features).map(|(a, b)| a * b).sum::<f64>() + bias[0]
    }
}

/// Per-track feature for this baseline: the mean over frames of the MFCC
/// matrix columns.
pub fn mean_mfcc(mfcc: &Matrix) -> Vec<f64> {
    mfcc.column_means()
}

/// Fit the hyperplane by random sample consensus.
///
/// Each iteration draws `dim + 1` distinct tracks (the minimal set that
/// determines an affine hyperplane), fits least squares, and counts inliers
/// with residual strictly below the threshold over the whole training set.
/// The largest consensus set wins and the final model is refit on it. A
/// numerically unusable draw counts against the iteration budget; if every
/// iteration is degenerate, training fails.
pub fn train_ga(features: &[Vec<f64>], labels: &[Label], cfg: &GaConfig) -> Result<RansacModel> {
    if features.is_empty() {
        return Err(Error::EmptyInput("GA training set"));
    }
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch {
            context: "GA features vs labels",
            left: features.len(),
            right: labels.len(),
        });
    }
    if labels.iter().all(|&l| l == Label::Song) {
        return Err(Error::SingleClass("Song"));
    }
    if labels.iter().all(|&l| l == Label::Instrumental) {
        return Err(Error::SingleClass("Instrumental"));
    }
    let dim = features[0].len();
    if features.iter().any(|f| f.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: features.iter().find(|f| f.len() != dim).unwrap().len(),
        });
    }
    let minimal = dim + 1;
    if features.len() < minimal {
        return Err(Error::DegenerateFit(format!(
            "RANSAC needs at least {minimal} tracks, got {}",
            features.len()
        )));
    }

    let targets: Vec<f64> = labels
        .iter()
        .map(|&l| match l {
            Label::Song => -1.0,
            Label::Instrumental => 1.0,
        })
        .collect();

    let mut rng = seeded_rng(cfg.seed, "baseline/ga");
    let mut best_inliers: Vec<usize> = Vec::new();
    let mut best_weights: Option<Vec<f64>> = None;

    for _ in 0..cfg.iterations {
        let draw: Vec<usize> = index_sample(&mut rng, features.len(), minimal)
            .into_iter()
            .collect();
        let Some(weights) = fit_least_squares(features, &targets, &draw, dim) else {
            continue; // degenerate draw: burn the iteration and resample
        };
        let inliers: Vec<usize> = (0..features.len())
            .filter(|&i| {
                let residual = score_with(&weights, &features[i]) - targets[i];
                residual.abs() < cfg.inlier_threshold
            })
            .collect();
        if inliers.len() > best_inliers.len() {
            best_inliers = inliers;
            best_weights = Some(weights);
        }
    }

    let sample_fit = best_weights.ok_or_else(|| {
        Error::DegenerateFit("every RANSAC iteration produced a degenerate sample".into())
    })?;
    // refit on the consensus set; fall back to the sample fit if that solve
    // is itself degenerate
    let weights = fit_least_squares(features, &targets, &best_inliers, dim).unwrap_or(sample_fit);

    Ok(RansacModel {
        weights,
        inlier_threshold: cfg.inlier_threshold,
        iterations: cfg.iterations,
        seed: cfg.seed,
    })
}

/// Classify by the sign of the hyperplane output; zero resolves to Song.
pub fn predict_ga(
    model: &RansacModel,
    isrcs: &[Isrc],
    features: &[Vec<f64>],
) -> Result<Vec<TrackPrediction>> {
    if isrcs.len() != features.len() {
        return Err(Error::LengthMismatch {
            context: "GA isrcs vs features",
            left: isrcs.len(),
            right: features.len(),
        });
    }
    features
        .iter()
        .zip(isrcs)
        .map(|(f, isrc)| {
            if f.len() != model.dim() {
                return Err(Error::DimensionMismatch {
                    expected: model.dim(),
                    got: f.len(),
                });
            }
            let margin = model.score(f);
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

fn score_with(weights: &[f64], features: &[f64]) -> f64 {
    let dim = weights.len() - 1;
    weights[..dim]
        .iter()
        .zip(features)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        + weights[dim]
}

/// Least squares over the selected rows via lightly regularized normal
/// equations, so rank-deficient draws (constant or zero features) still give
/// the minimum-norm fit instead of failing outright.
fn fit_least_squares(
    features: &[Vec<f64>],
    targets: &[f64],
    rows: &[usize],
    dim: usize,
) -> Option<Vec<f64>> {
    const RIDGE: f64 = 1e-9;
    let n_coef = dim + 1;
    let mut ata = vec![0.0; n_coef * n_coef];
    let mut aty = vec![0.0; n_coef];
    let mut row = vec![0.0; n_coef];
    for &r in rows {
        row[..dim].copy_from_slice(&features[r]);
        row[dim] = 1.0;
        for i in 0..n_coef {
            aty[i] += row[i] * targets[r];
            for j in 0..n_coef {
                ata[i * n_coef + j] += row[i] * row[j];
            }
        }
    }
    for i in 0..n_coef {
        ata[i * n_coef + i] += RIDGE;
    }
    let solution = solve_dense(&mut ata, &mut aty, n_coef)?;
    solution.iter().all(|w| w.is_finite()).then_some(solution)
}

/// Gaussian elimination with partial pivoting; `None` when a pivot vanishes.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| a[r1 * n + col].abs().total_cmp(&a[r2 * n + col].abs()))
            .unwrap();
        if a[pivot_row * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / a[col * n + col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    Some(x)
}
