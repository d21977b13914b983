//! Frame-scale vocal-activity ground truth.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted, non-overlapping voiced intervals `(start_s, end_s)` within one
/// track. Intervals are half-open: a timestamp `t` is voiced iff
/// `start <= t < end` for some interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocalActivityAnnotation {
    intervals: Vec<(f64, f64)>,
}

impl VocalActivityAnnotation {
    /// Build from unordered intervals; sorts by start and validates that
    /// every interval is forward (`start < end`), non-negative, and disjoint
    /// from its neighbors.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<VocalActivityAnnotation> {
        for &(start, end) in &intervals {
            if !start.is_finite() || !end.is_finite() {
                return Err(Error::InvalidAnnotation("non-finite interval bound".into()));
            }
            if start < 0.0 {
                return Err(Error::InvalidAnnotation(format!(
                    "negative start {start}"
                )));
            }
            if start >= end {
                return Err(Error::InvalidAnnotation(format!(
                    "inverted interval ({start}, {end})"
                )));
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        for pair in intervals.windows(2) {
            if pair[1].0 < pair[0].1 {
                return Err(Error::InvalidAnnotation(format!(
                    "overlapping intervals ({}, {}) and ({}, {})",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                )));
            }
        }
        Ok(VocalActivityAnnotation { intervals })
    }

    /// A fully unvoiced annotation (instrumental or silent-vocal track).
    pub fn empty() -> VocalActivityAnnotation {
        VocalActivityAnnotation {
            intervals: Vec::new(),
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Whether timestamp `t` lies inside any voiced interval (half-open).
    pub fn is_voiced_at(&self, t: f64) -> bool {
        // Intervals are sorted and disjoint: find the last start <= t.
        let idx = self.intervals.partition_point(|&(start, _)| start <= t);
        idx > 0 && t < self.intervals[idx - 1].1
    }

    /// Total voiced seconds.
    pub fn voiced_duration_s(&self) -> f64 {
        self.intervals.iter().map(|(s, e)| e - s).sum()
    }
}
