//! Leaf-wise regression tree growth over binned features.
//!
//! Each round the leaf with the best histogram split (largest gain) is
//! split, until the leaf budget is hit or no split improves the loss. Split
//! search builds one (gradient, hessian, count) histogram per feature for
//! the leaf's samples, then scans bin boundaries. Ties break toward the
//! lower feature index, then the lower bin index; across leaves toward the
//! earlier-created leaf. Histogram accumulation walks samples in index
//! order per feature, so the result does not depend on the worker count.

use serde::{Deserialize, Serialize};

use super::binning::BinnedDataset;
use super::{GbdtError, TrainParams};
use crate::parallel::{map_indices, Parallelism};

/// Second-order split gain with an L2 penalty on leaf values.
///
/// A zero denominator (empty side with lambda 0) contributes 0.
pub fn split_gain(g_l: f64, h_l: f64, g_r: f64, h_r: f64, l2_lambda: f64) -> f64 {
    let term = |g: f64, h: f64| {
        let denom = h + l2_lambda;
        if denom > 0.0 {
            g * g / denom
        } else {
            0.0
        }
    };
    term(g_l, h_l) + term(g_r, h_r) - term(g_l + g_r, h_l + h_r)
}

fn leaf_value(g: f64, h: f64, l2_lambda: f64) -> f64 {
    let denom = h + l2_lambda;
    if denom > 0.0 {
        -g / denom
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Internal {
        feature: usize,
        bin_threshold: u16,
        left: usize,
        right: usize,
    },
    Leaf {
        leaf_value: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    /// Route one binned sample (accessor: feature -> bin) to its leaf value.
    pub fn predict_bins(&self, bin_at: impl Fn(usize) -> u16) -> f64 {
        let mut idx = 0usize;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { leaf_value } => return *leaf_value,
                Node::Internal { feature, bin_threshold, left, right } => {
                    idx = if bin_at(*feature) <= *bin_threshold { *left } else { *right };
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Split {
    pub gain: f64,
    pub feature: usize,
    pub bin: u16,
}

/// Best split of one leaf by exhaustive scan over (feature, bin) histograms.
pub fn best_split(
    binned: &BinnedDataset,
    indices: &[usize],
    grad: &[f64],
    hess: &[f64],
    params: &TrainParams,
    par: Parallelism,
) -> Option<Split> {
    let per_feature: Vec<Option<Split>> = map_indices(par, binned.n_features(), |f| {
        let n_bins = binned.n_bins(f);
        if n_bins < 2 {
            return None;
        }
        let mut hist = vec![(0.0f64, 0.0f64, 0usize); n_bins];
        let feature_bins = &binned.bins[f];
        for &i in indices {
            let b = feature_bins[i] as usize;
            hist[b].0 += grad[i];
            hist[b].1 += hess[i];
            hist[b].2 += 1;
        }
        let (g_total, h_total, n_total) = hist
            .iter()
            .fold((0.0, 0.0, 0usize), |acc, &(g, h, c)| (acc.0 + g, acc.1 + h, acc.2 + c));
        let mut best: Option<Split> = None;
        let (mut g_l, mut h_l, mut n_l) = (0.0f64, 0.0f64, 0usize);
        for t in 0..n_bins - 1 {
            g_l += hist[t].0;
            h_l += hist[t].1;
            n_l += hist[t].2;
            let n_r = n_total - n_l;
            if n_l < params.min_data_in_leaf || n_r < params.min_data_in_leaf {
                continue;
            }
            let gain = split_gain(g_l, h_l, g_total - g_l, h_total - h_l, params.l2_lambda);
            if gain > 0.0 && best.map_or(true, |b| gain > b.gain) {
                best = Some(Split { gain, feature: f, bin: t as u16 });
            }
        }
        best
    });
    // fixed reduction order: lower feature index wins ties
    let mut overall: Option<Split> = None;
    for s in per_feature.into_iter().flatten() {
        if overall.map_or(true, |b| s.gain > b.gain) {
            overall = Some(s);
        }
    }
    overall
}

struct PendingLeaf {
    node: usize,
    created: usize,
    indices: Vec<usize>,
    g_sum: f64,
    h_sum: f64,
    split: Option<Split>,
}

/// Grow one tree leaf-wise from gradients/hessians of the current round.
pub fn grow_tree(
    binned: &BinnedDataset,
    grad: &[f64],
    hess: &[f64],
    params: &TrainParams,
    par: Parallelism,
) -> Result<RegressionTree, GbdtError> {
    if binned.n_rows == 0 {
        return Err(GbdtError::EmptyDataset);
    }
    debug_assert_eq!(grad.len(), binned.n_rows);
    debug_assert_eq!(hess.len(), binned.n_rows);

    let root_indices: Vec<usize> = (0..binned.n_rows).collect();
    let g_sum: f64 = grad.iter().sum();
    let h_sum: f64 = hess.iter().sum();
    let root_split = best_split(binned, &root_indices, grad, hess, params, par);

    let mut nodes: Vec<Node> = vec![Node::Leaf { leaf_value: 0.0 }];
    let mut pending = vec![PendingLeaf {
        node: 0,
        created: 0,
        indices: root_indices,
        g_sum,
        h_sum,
        split: root_split,
    }];
    let mut n_leaves = 1usize;
    let mut created = 1usize;

    while n_leaves < params.max_leaves {
        // earliest-created leaf wins gain ties
        let chosen = pending
            .iter()
            .enumerate()
            .filter(|(_, l)| l.split.is_some())
            .max_by(|(_, a), (_, b)| {
                a.split
                    .unwrap()
                    .gain
                    .total_cmp(&b.split.unwrap().gain)
                    .then(b.created.cmp(&a.created))
            })
            .map(|(i, _)| i);
        let Some(chosen) = chosen else { break };
        let leaf = pending.swap_remove(chosen);
        let split = leaf.split.unwrap();

        let feature_bins = &binned.bins[split.feature];
        let mut left_idx = Vec::new();
        let mut right_idx = Vec::new();
        for &i in &leaf.indices {
            if feature_bins[i] <= split.bin {
                left_idx.push(i);
            } else {
                right_idx.push(i);
            }
        }
        let (gl, hl) = left_idx
            .iter()
            .fold((0.0, 0.0), |acc, &i| (acc.0 + grad[i], acc.1 + hess[i]));
        let (gr, hr) = (leaf.g_sum - gl, leaf.h_sum - hl);

        let left_node = nodes.len();
        let right_node = nodes.len() + 1;
        nodes.push(Node::Leaf { leaf_value: leaf_value(gl, hl, params.l2_lambda) });
        nodes.push(Node::Leaf { leaf_value: leaf_value(gr, hr, params.l2_lambda) });
        nodes[leaf.node] = Node::Internal {
            feature: split.feature,
            bin_threshold: split.bin,
            left: left_node,
            right: right_node,
        };
        n_leaves += 1;

        for (node, indices, g, h) in [
            (left_node, left_idx, gl, hl),
            (right_node, right_idx, gr, hr),
        ] {
            let split = if n_leaves < params.max_leaves {
                best_split(binned, &indices, grad, hess, params, par)
            } else {
                None
            };
            pending.push(PendingLeaf { node, created, indices, g_sum: g, h_sum: h, split });
            created += 1;
        }
    }

    // unsplit leaves get their closed-form value
    for leaf in pending {
        if let Node::Leaf { leaf_value: v } = &mut nodes[leaf.node] {
            *v = leaf_value(leaf.g_sum, leaf.h_sum, params.l2_lambda);
        }
    }
    Ok(RegressionTree { nodes })
}
