//! Second-order loss derivatives for binary and multiclass log loss.

use serde::{Deserialize, Serialize};

use super::GbdtError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Objective {
    Binary,
    Multiclass { num_class: usize },
}

impl Objective {
    pub fn num_class(&self) -> usize {
        match self {
            Objective::Binary => 1,
            Objective::Multiclass { num_class } => *num_class,
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Softmax of one row of raw scores.
pub fn softmax(raw: &[f64]) -> Vec<f64> {
    let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = raw.iter().map(|&r| (r - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Gradients and hessians of the log loss at the current raw scores.
///
/// Binary: `raw_scores` has one score per sample. Multiclass: `raw_scores`
/// is row-major `n x K` and the output pair is likewise row-major.
pub fn loss_grad(
    objective: Objective,
    raw_scores: &[f64],
    labels: &[usize],
) -> Result<(Vec<f64>, Vec<f64>), GbdtError> {
    match objective {
        Objective::Binary => {
            if let Some(&bad) = labels.iter().find(|&&y| y > 1) {
                return Err(GbdtError::LabelOutOfRange(bad));
            }
            let n = labels.len();
            debug_assert_eq!(raw_scores.len(), n);
            let mut grad = vec![0.0; n];
            let mut hess = vec![0.0; n];
            for i in 0..n {
                let p = sigmoid(raw_scores[i]);
                grad[i] = p - labels[i] as f64;
                hess[i] = p * (1.0 - p);
            }
            Ok((grad, hess))
        }
        Objective::Multiclass { num_class } => {
            if let Some(&bad) = labels.iter().find(|&&y| y >= num_class) {
                return Err(GbdtError::LabelOutOfRange(bad));
            }
            let n = labels.len();
            debug_assert_eq!(raw_scores.len(), n * num_class);
            let mut grad = vec![0.0; n * num_class];
            let mut hess = vec![0.0; n * num_class];
            for i in 0..n {
                let row = &raw_scores[i * num_class..(i + 1) * num_class];
                let p = softmax(row);
                for k in 0..num_class {
                    let target = if labels[i] == k { 1.0 } else { 0.0 };
                    grad[i * num_class + k] = p[k] - target;
                    hess[i * num_class + k] = p[k] * (1.0 - p[k]);
                }
            }
            Ok((grad, hess))
        }
    }
}
