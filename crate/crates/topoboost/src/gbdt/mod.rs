//! Histogram-binned, leaf-wise gradient-boosted trees for binary and
//! multiclass classification.
//!
//! Training is fully deterministic: no feature subsampling, no bagging, and
//! all floating-point reductions run in a fixed order regardless of the
//! worker count. Multiclass fits one tree per class per round with softmax
//! coupling.

pub mod binning;
mod model;
pub mod objective;
pub mod tree;

pub use binning::{bin_features, BinnedDataset};
pub use objective::{loss_grad, softmax, Objective};
pub use tree::{grow_tree, split_gain, RegressionTree};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parallel::Parallelism;
use binning::bin_of;
use objective::sigmoid;

#[derive(Debug, Error)]
pub enum GbdtError {
    #[error("feature matrix contains a non-finite value")]
    NonFiniteFeature,
    #[error("label {0} out of range for the objective")]
    LabelOutOfRange(usize),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("binary training requires both classes present")]
    SingleClassDataset,
    #[error("expected {expected} features, got {got}")]
    FeatureCountMismatch { expected: usize, got: usize },
    #[error("model file: {0}")]
    BadModelFile(String),
}

/// Dense row-major feature matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        debug_assert!(rows.iter().all(|r| r.len() == m));
        FeatureMatrix { rows: n, cols: m, values: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }
}

/// Training hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    #[serde(default = "defaults::num_trees")]
    pub num_trees: usize,
    #[serde(default = "defaults::learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "defaults::max_leaves")]
    pub max_leaves: usize,
    #[serde(default = "defaults::min_data_in_leaf")]
    pub min_data_in_leaf: usize,
    #[serde(default = "defaults::l2_lambda")]
    pub l2_lambda: f64,
    #[serde(default = "defaults::max_bins")]
    pub max_bins: usize,
    #[serde(default)]
    pub objective: Option<Objective>,
    #[serde(default)]
    pub seed: u64,
}

mod defaults {
    pub fn num_trees() -> usize { 100 }
    pub fn learning_rate() -> f64 { 0.1 }
    pub fn max_leaves() -> usize { 31 }
    pub fn min_data_in_leaf() -> usize { 20 }
    pub fn l2_lambda() -> f64 { 1.0 }
    pub fn max_bins() -> usize { 256 }
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            num_trees: defaults::num_trees(),
            learning_rate: defaults::learning_rate(),
            max_leaves: defaults::max_leaves(),
            min_data_in_leaf: defaults::min_data_in_leaf(),
            l2_lambda: defaults::l2_lambda(),
            max_bins: defaults::max_bins(),
            objective: None,
            seed: 0,
        }
    }
}

/// Trained additive ensemble plus everything prediction needs: the
/// objective, per-class priors, the learning rate, and the frozen bin
/// boundaries. Raw score = base + learning_rate * sum of tree outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct BoostedEnsemble {
    pub objective: Objective,
    pub base_score: Vec<f64>,
    pub learning_rate: f64,
    pub bin_boundaries: Vec<Vec<f64>>,
    /// Round-major; `num_class` trees per round for multiclass.
    pub trees: Vec<RegressionTree>,
}

impl BoostedEnsemble {
    pub fn n_features(&self) -> usize {
        self.bin_boundaries.len()
    }

    pub fn to_json(&self) -> String {
        model::to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, GbdtError> {
        model::from_json(text)
    }
}

const PRIOR_EPS: f64 = 1e-15;

/// Train a boosted ensemble. Deterministic given (X, y, params).
pub fn train(x: &FeatureMatrix, y: &[usize], params: &TrainParams) -> Result<BoostedEnsemble, GbdtError> {
    train_with_parallelism(x, y, params, Parallelism::default())
}

/// [`train`] with an explicit execution mode; output is identical for both.
pub fn train_with_parallelism(
    x: &FeatureMatrix,
    y: &[usize],
    params: &TrainParams,
    par: Parallelism,
) -> Result<BoostedEnsemble, GbdtError> {
    if x.rows == 0 || y.is_empty() {
        return Err(GbdtError::EmptyDataset);
    }
    debug_assert_eq!(x.rows, y.len());
    let objective = params.objective.unwrap_or(Objective::Binary);
    let n = x.rows;
    let k = objective.num_class();

    let base_score = match objective {
        Objective::Binary => {
            if let Some(&bad) = y.iter().find(|&&l| l > 1) {
                return Err(GbdtError::LabelOutOfRange(bad));
            }
            let pos = y.iter().filter(|&&l| l == 1).count();
            if pos == 0 || pos == n {
                return Err(GbdtError::SingleClassDataset);
            }
            let p = pos as f64 / n as f64;
            vec![(p / (1.0 - p)).ln()]
        }
        Objective::Multiclass { num_class } => {
            if let Some(&bad) = y.iter().find(|&&l| l >= num_class) {
                return Err(GbdtError::LabelOutOfRange(bad));
            }
            (0..num_class)
                .map(|c| {
                    let p = (y.iter().filter(|&&l| l == c).count() as f64 / n as f64)
                        .clamp(PRIOR_EPS, 1.0 - PRIOR_EPS);
                    p.ln()
                })
                .collect()
        }
    };

    let binned = bin_features(x, params.max_bins)?;

    // raw[i * k + c]
    let mut raw: Vec<f64> = (0..n * k).map(|i| base_score[i % k]).collect();
    let mut trees = Vec::with_capacity(params.num_trees * k);
    let mut class_grad = vec![0.0; n];
    let mut class_hess = vec![0.0; n];
    for _round in 0..params.num_trees {
        let (grad, hess) = loss_grad(objective, &raw, y)?;
        for c in 0..k {
            for i in 0..n {
                class_grad[i] = grad[i * k + c];
                class_hess[i] = hess[i * k + c];
            }
            let tree = grow_tree(&binned, &class_grad, &class_hess, params, par)?;
            for i in 0..n {
                raw[i * k + c] += params.learning_rate * tree.predict_bins(|f| binned.bins[f][i]);
            }
            trees.push(tree);
        }
    }

    Ok(BoostedEnsemble {
        objective,
        base_score,
        learning_rate: params.learning_rate,
        bin_boundaries: binned.boundaries,
        trees,
    })
}

/// Raw (pre-link) scores, one per class for multiclass.
pub fn predict_raw(model: &BoostedEnsemble, x: &FeatureMatrix) -> Result<Vec<Vec<f64>>, GbdtError> {
    if x.cols != model.n_features() {
        return Err(GbdtError::FeatureCountMismatch { expected: model.n_features(), got: x.cols });
    }
    let k = model.objective.num_class();
    let mut out = Vec::with_capacity(x.rows);
    for r in 0..x.rows {
        let row = x.row(r);
        let bins: Vec<u16> = (0..x.cols)
            .map(|f| bin_of(&model.bin_boundaries[f], row[f]))
            .collect();
        let mut raw = model.base_score.clone();
        for (t, tree) in model.trees.iter().enumerate() {
            raw[t % k] += model.learning_rate * tree.predict_bins(|f| bins[f]);
        }
        out.push(raw);
    }
    Ok(out)
}

/// Class probabilities: sigmoid (binary, one column) or softmax rows.
pub fn predict_proba(model: &BoostedEnsemble, x: &FeatureMatrix) -> Result<Vec<Vec<f64>>, GbdtError> {
    let raw = predict_raw(model, x)?;
    Ok(raw
        .into_iter()
        .map(|row| match model.objective {
            Objective::Binary => vec![sigmoid(row[0])],
            Objective::Multiclass { .. } => softmax(&row),
        })
        .collect())
}

/// Hard labels: threshold 0.5 for binary, argmax (lowest index wins ties)
/// for multiclass.
pub fn predict_labels(model: &BoostedEnsemble, x: &FeatureMatrix) -> Result<Vec<usize>, GbdtError> {
    let proba = predict_proba(model, x)?;
    Ok(proba
        .into_iter()
        .map(|row| match model.objective {
            Objective::Binary => usize::from(row[0] >= 0.5),
            Objective::Multiclass { .. } => {
                let mut best = 0;
                for (i, &p) in row.iter().enumerate() {
                    if p > row[best] {
                        best = i;
                    }
                }
                best
            }
        })
        .collect())
}

/// Mean log loss of the model on labeled data (used by the loss-decrease
/// checks).
pub fn log_loss(model: &BoostedEnsemble, x: &FeatureMatrix, y: &[usize]) -> Result<f64, GbdtError> {
    let proba = predict_proba(model, x)?;
    let mut total = 0.0;
    for (row, &label) in proba.iter().zip(y) {
        let p = match model.objective {
            Objective::Binary => {
                if label == 1 { row[0] } else { 1.0 - row[0] }
            }
            Objective::Multiclass { .. } => row[label],
        };
        total -= p.max(PRIOR_EPS).ln();
    }
    Ok(total / y.len() as f64)
}
