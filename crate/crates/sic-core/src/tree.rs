//! Weighted binary decision trees with axis-aligned Gini splits.
//!
//! One learner serves both ensembles: the frame-level random forest (bootstrap
//! indices, random feature subsets) and the boosted track classifier (evolving
//! sample weights, all features). Leaves store the weighted positive fraction,
//! so callers can read them as soft probabilities or harden them at 0.5.

use alloc::vec::Vec;

use rand::seq::index::sample as index_sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

/// Stopping and split-candidate parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub max_depth: usize,
    /// Minimum sample count (with bootstrap repeats) in each child.
    pub min_leaf: usize,
    /// Number of random feature candidates per split; `None` scans all.
    pub mtry: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        positive_fraction: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    n_features: usize,
}

/// Borrowed training view: rows of `features` with aligned labels and weights.
#[derive(Clone, Copy)]
pub struct TreeDataset<'a> {
    pub features: &'a Matrix,
    pub labels: &'a [bool],
    pub weights: &'a [f64],
}

impl DecisionTree {
    /// Fit on the rows named by `indices` (repeats allowed, as produced by
    /// bootstrap sampling). `rng` is only consulted when `cfg.mtry` asks for
    /// feature subsampling.
    pub fn fit(
        data: TreeDataset<'_>,
        indices: &[usize],
        cfg: &TreeConfig,
        mut rng: Option<&mut ChaCha8Rng>,
    ) -> DecisionTree {
        debug_assert_eq!(data.features.n_rows(), data.labels.len());
        debug_assert_eq!(data.labels.len(), data.weights.len());
        let mut builder = Builder {
            data,
            cfg,
            nodes: Vec::new(),
        };
        let mut scratch = indices.to_vec();
        builder.grow(&mut scratch, 0, &mut rng);
        DecisionTree {
            nodes: builder.nodes,
            n_features: data.features.n_cols(),
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Depth of the deepest leaf (a single-leaf tree has depth 0).
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Weighted positive fraction of the leaf this sample reaches.
    pub fn predict_fraction(&self, sample: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { positive_fraction } => return positive_fraction,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if sample[feature] <= threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Hard vote: positive iff the leaf fraction exceeds one half. A leaf
    /// sitting exactly at 0.5 votes negative.
    pub fn predict_positive(&self, sample: &[f64]) -> bool {
        self.predict_fraction(sample) > 0.5
    }

    pub fn leaves(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf { positive_fraction } => Some(*positive_fraction),
            Node::Split { .. } => None,
        })
    }
}

struct Builder<'a> {
    data: TreeDataset<'a>,
    cfg: &'a TreeConfig,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    child_impurity: f64,
}

fn gini(p: f64) -> f64 {
    2.0 * p * (1.0 - p)
}

impl Builder<'_> {
    /// Grow a subtree over `indices` (reordered in place) and return its
    /// node id.
    fn grow(
        &mut self,
        indices: &mut [usize],
        depth: usize,
        rng: &mut Option<&mut ChaCha8Rng>,
    ) -> usize {
        let (w_pos, w_all) = self.node_weight(indices);
        let fraction = if w_all > 0.0 { w_pos / w_all } else { 0.0 };

        let pure = indices
            .iter()
            .all(|&i| self.data.labels[i] == self.data.labels[indices[0]]);
        if depth >= self.cfg.max_depth || pure || indices.len() < 2 * self.cfg.min_leaf {
            return self.push(Node::Leaf {
                positive_fraction: fraction,
            });
        }

        let parent_impurity = w_all * gini(fraction);
        let best = self.best_split(indices, parent_impurity, rng);
        let Some(split) = best else {
            return self.push(Node::Leaf {
                positive_fraction: fraction,
            });
        };

        let mid = partition(indices, |i| {
            self.data.features.get(i, split.feature) <= split.threshold
        });
        let (left_idx, right_idx) = indices.split_at_mut(mid);
        // reserve the split slot before the children claim ids
        let id = self.push(Node::Leaf {
            positive_fraction: fraction,
        });
        let left = self.grow(left_idx, depth + 1, rng);
        let right = self.grow(right_idx, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    fn node_weight(&self, indices: &[usize]) -> (f64, f64) {
        let mut w_pos = 0.0;
        let mut w_all = 0.0;
        for &i in indices {
            let w = self.data.weights[i];
            w_all += w;
            if self.data.labels[i] {
                w_pos += w;
            }
        }
        (w_pos, w_all)
    }

    fn best_split(
        &self,
        indices: &[usize],
        parent_impurity: f64,
        rng: &mut Option<&mut ChaCha8Rng>,
    ) -> Option<BestSplit> {
        let n_features = self.data.features.n_cols();
        let candidates: Vec<usize> = match (self.cfg.mtry, rng) {
            (Some(m), Some(rng)) if m < n_features => {
                index_sample(*rng, n_features, m).into_iter().collect()
            }
            _ => (0..n_features).collect(),
        };

        let (w_pos_total, w_total) = self.node_weight(indices);
        let mut best: Option<BestSplit> = None;
        let mut column: Vec<(f64, f64, bool)> = Vec::with_capacity(indices.len());

        for &feature in &candidates {
            column.clear();
            column.extend(indices.iter().map(|&i| {
                (
                    self.data.features.get(i, feature),
                    self.data.weights[i],
                    self.data.labels[i],
                )
            }));
            column.sort_by(|a, b| a.0.total_cmp(&b.0));

            let mut left_w = 0.0;
            let mut left_pos = 0.0;
            for (count, window) in column.windows(2).enumerate() {
                let (value, weight, positive) = window[0];
                left_w += weight;
                if positive {
                    left_pos += weight;
                }
                let next_value = window[1].0;
                if next_value <= value {
                    continue; // no boundary between equal values
                }
                let left_count = count + 1;
                let right_count = column.len() - left_count;
                if left_count < self.cfg.min_leaf || right_count < self.cfg.min_leaf {
                    continue;
                }
                let right_w = w_total - left_w;
                if left_w <= 0.0 || right_w <= 0.0 {
                    continue;
                }
                let right_pos = w_pos_total - left_pos;
                let impurity =
                    left_w * gini(left_pos / left_w) + right_w * gini(right_pos / right_w);
                let improves = impurity < parent_impurity - 1e-12
                    && best.as_ref().is_none_or(|b| impurity < b.child_impurity);
                if improves {
                    // C4.5-style threshold: sit on the observed boundary
                    // value instead of the midpoint, so the cut hugs the
                    // left group's support and unseen in-between values fall
                    // to the right
                    best = Some(BestSplit {
                        feature,
                        threshold: value,
                        child_impurity: impurity,
                    });
                }
            }
        }
        best
    }

    fn push(&mut self, node: Node) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }
}

/// Stable two-way partition; returns the boundary index.
fn partition(indices: &mut [usize], goes_left: impl Fn(usize) -> bool) -> usize {
    let mut left: Vec<usize> = Vec::with_capacity(indices.len());
    let mut right: Vec<usize> = Vec::with_capacity(indices.len());
    for &i in indices.iter() {
        if goes_left(i) {
            left.push(i);
        } else {
            right.push(i);
        }
    }
    let mid = left.len();
    indices[..mid].copy_from_slice(&left);
    indices[mid..].copy_from_slice(&right);
    mid
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn uniform_weights(n: usize) -> Vec<f64> {
        vec![1.0; n]
    }

    #[test]
    fn splits_a_separable_line() {
        // one feature, negatives below zero, positives above
        let features = Matrix::from_rows(vec![-2.0, -1.0, 1.0, 2.0], 1);
        let labels = vec![false, false, true, true];
        let weights = uniform_weights(4);
        let data = TreeDataset {
            features: &features,
            labels: &labels,
            weights: &weights,
        };
        let cfg = TreeConfig {
            max_depth: 3,
            min_leaf: 1,
            mtry: None,
        };
        let tree = DecisionTree::fit(data, &[0, 1, 2, 3], &cfg, None);
        assert!(!tree.predict_positive(&[-1.5]));
        assert!(tree.predict_positive(&[1.5]));
        assert_eq!(tree.depth(), 1);
    }

    #[test]
    fn pure_node_stops_immediately() {
        let features = Matrix::from_rows(vec![0.0, 1.0, 2.0], 1);
        let labels = vec![true, true, true];
        let weights = uniform_weights(3);
        let data = TreeDataset {
            features: &features,
            labels: &labels,
            weights: &weights,
        };
        let cfg = TreeConfig {
            max_depth: 5,
            min_leaf: 1,
            mtry: None,
        };
        let tree = DecisionTree::fit(data, &[0, 1, 2], &cfg, None);
        assert_eq!(tree.depth(), 0);
        assert_eq!(tree.predict_fraction(&[7.0]), 1.0);
    }

    #[test]
    fn respects_min_leaf() {
        // the only useful boundary would isolate a single sample
        let features = Matrix::from_rows(vec![0.0, 1.0, 1.0, 1.0], 1);
        let labels = vec![true, false, false, false];
        let weights = uniform_weights(4);
        let data = TreeDataset {
            features: &features,
            labels: &labels,
            weights: &weights,
        };
        let cfg = TreeConfig {
            max_depth: 4,
            min_leaf: 2,
            mtry: None,
        };
        let tree = DecisionTree::fit(data, &[0, 1, 2, 3], &cfg, None);
        assert_eq!(tree.depth(), 0, "split would starve a child below min_leaf");
        assert_eq!(tree.predict_fraction(&[0.0]), 0.25);
    }

    #[test]
    fn weights_steer_the_split() {
        // Unweighted, feature 0 separates three of four samples; upweighting
        // the one sample it misplaces drags the boundary to feature 1.
        let features = Matrix::from_rows(
            vec![
                0.0, 0.0, //
                1.0, 0.0, //
                1.0, 1.0, //
                0.0, 1.0,
            ],
            2,
        );
        let labels = vec![false, false, true, true];
        let heavy = vec![1.0, 8.0, 8.0, 1.0];
        let data = TreeDataset {
            features: &features,
            labels: &labels,
            weights: &heavy,
        };
        let cfg = TreeConfig {
            max_depth: 1,
            min_leaf: 1,
            mtry: None,
        };
        let tree = DecisionTree::fit(data, &[0, 1, 2, 3], &cfg, None);
        // feature 1 cleanly separates the heavy pair; feature 0 cannot
        assert!(tree.predict_positive(&[0.0, 1.0]));
        assert!(!tree.predict_positive(&[0.0, 0.0]));
    }

    #[test]
    fn depth_zero_config_yields_single_leaf() {
        let features = Matrix::from_rows(vec![0.0, 1.0], 1);
        let labels = vec![false, true];
        let weights = uniform_weights(2);
        let data = TreeDataset {
            features: &features,
            labels: &labels,
            weights: &weights,
        };
        let cfg = TreeConfig {
            max_depth: 0,
            min_leaf: 1,
            mtry: None,
        };
        let tree = DecisionTree::fit(data, &[0, 1], &cfg, None);
        assert_eq!(tree.depth(), 0);
        assert_eq!(tree.predict_fraction(&[0.5]), 0.5);
    }
}
