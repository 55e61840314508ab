//! End-to-end flow: pixel flattening, pixel/topological feature fusion with
//! alpha/beta truncation, Gaussian noise injection, metric computation, and
//! the truncation-sweep experiment comparing pixel-only against fused
//! features.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{ingest_dataset, DatasetError};
use crate::gbdt::{
    self, BoostedEnsemble, FeatureMatrix, GbdtError, Objective, TrainParams,
};
use crate::image_topo::{
    image_to_point_cloud, to_grayscale, vectorize_diagrams, GrayImage, Image, ImageError,
};
use crate::parallel::{map_indices, Parallelism};
use crate::ph::{
    build_rips_filtration, compute_persistence, pairwise_distances, PersistenceDiagram, PhError,
};
use crate::seed::{indexed_seed, stream_seed, STREAM_NOISE, STREAM_SPLIT};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("length mismatch: {0} predictions vs {1} labels")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    EmptyInput,
    #[error("empty dataset")]
    DatasetEmpty,
    #[error("dataset contains a single class")]
    SingleClass,
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Ph(#[from] PhError),
    #[error(transparent)]
    Gbdt(#[from] GbdtError),
    #[error("bad feature csv: {0}")]
    BadFeatureCsv(String),
    #[error("bad config: {0}")]
    BadConfig(String),
}

/// Prefix of a row-major pixel flattening, length exactly `beta` (clamped to
/// the available length; pixels are never invented).
#[derive(Clone, Debug, PartialEq)]
pub struct PixelVector {
    pub values: Vec<f64>,
}

pub fn flatten_pixels(data: &[f64], beta: usize) -> PixelVector {
    let beta = beta.min(data.len());
    PixelVector { values: data[..beta].to_vec() }
}

/// Concatenation [pixel block, topo block].
#[derive(Clone, Debug, PartialEq)]
pub struct FusedFeatureVector {
    pub values: Vec<f64>,
}

pub fn fuse(pix: &PixelVector, topo: &crate::image_topo::TopoFeatureVector) -> FusedFeatureVector {
    let mut values = Vec::with_capacity(pix.values.len() + topo.values.len());
    values.extend_from_slice(&pix.values);
    values.extend_from_slice(&topo.values);
    FusedFeatureVector { values }
}

/// Gaussian noise parameters on the [0, 1] intensity scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub mean: f64,
    pub sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

/// Add per-pixel i.i.d. normal(mean, sigma^2) noise, then clip to [0, 1].
/// Deterministic for a fixed seed: pixels are drawn in row-major order.
pub fn add_gaussian_noise(img: &Image, spec: &NoiseSpec) -> Image {
    assert!(spec.sigma >= 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(spec.mean, spec.sigma).expect("sigma >= 0");
    let data = img
        .data
        .iter()
        .map(|&v| (v + normal.sample(&mut rng)).clamp(0.0, 1.0))
        .collect();
    Image { height: img.height, width: img.width, channels: img.channels, data }
}

/// Binary counts or a K x K matrix indexed [truth][predicted].
#[derive(Clone, Debug, PartialEq)]
pub enum Confusion {
    Binary { tp: usize, fp: usize, tn: usize, fn_: usize },
    Multi(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub confusion: Confusion,
}

/// Metric averaging mode: one-vs-rest binary with a designated positive
/// class, or micro-averaged multiclass (under which all four metrics
/// coincide).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Averaging {
    Binary { positive: usize },
    Micro,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Accuracy, precision, recall and F1 from predicted vs true labels.
/// All 0/0 cases resolve to 0.
pub fn evaluate(
    predicted: &[usize],
    truth: &[usize],
    averaging: Averaging,
) -> Result<EvalReport, PipelineError> {
    if predicted.len() != truth.len() {
        return Err(PipelineError::LengthMismatch(predicted.len(), truth.len()));
    }
    if predicted.is_empty() {
        return Err(PipelineError::EmptyInput);
    }
    match averaging {
        Averaging::Binary { positive } => {
            let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
            for (&p, &t) in predicted.iter().zip(truth) {
                match (p == positive, t == positive) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fn_ += 1,
                    (false, false) => tn += 1,
                }
            }
            let precision = ratio(tp, tp + fp);
            let recall = ratio(tp, tp + fn_);
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            Ok(EvalReport {
                accuracy: ratio(tp + tn, tp + tn + fp + fn_),
                precision,
                recall,
                f1,
                confusion: Confusion::Binary { tp, fp, tn, fn_ },
            })
        }
        Averaging::Micro => {
            let k = predicted
                .iter()
                .chain(truth)
                .max()
                .map_or(0, |&m| m + 1);
            let mut matrix = vec![vec![0usize; k]; k];
            let mut correct = 0;
            for (&p, &t) in predicted.iter().zip(truth) {
                matrix[t][p] += 1;
                if p == t {
                    correct += 1;
                }
            }
            let acc = ratio(correct, predicted.len());
            Ok(EvalReport {
                accuracy: acc,
                precision: acc,
                recall: acc,
                f1: acc,
                confusion: Confusion::Multi(matrix),
            })
        }
    }
}

/// Stratified train/test split: per class, indices are shuffled by a
/// seed-derived RNG and the first `ratio` share goes to train (at least one
/// sample on each side when the class has two or more). Both halves are
/// returned sorted.
pub fn stratified_split(labels: &[usize], ratio_train: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    assert!(ratio_train > 0.0 && ratio_train < 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, STREAM_SPLIT));
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..k {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.is_empty() {
            continue;
        }
        use rand::seq::SliceRandom;
        idx.shuffle(&mut rng);
        let n = idx.len();
        let n_train = if n == 1 {
            1
        } else {
            (((n as f64) * ratio_train).round() as usize).clamp(1, n - 1)
        };
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Per-image output of the two feature streams.
#[derive(Clone, Debug)]
pub struct ImageFeatures {
    pub gray: GrayImage,
    pub diagrams: Vec<PersistenceDiagram>,
    /// Cap used for this image (explicit eps_max or the cloud diameter).
    pub eps_used: f64,
}

/// Topology/pixel extraction parameters shared by the CLI and experiment.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ExtractParams {
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
    /// None: cap each image's filtration at its own cloud diameter.
    #[serde(default)]
    pub eps_max: Option<f64>,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
}

fn default_tau() -> f64 { 0.5 }
fn default_max_points() -> usize { 100 }
fn default_max_dim() -> usize { 2 }

impl Default for ExtractParams {
    fn default() -> Self {
        ExtractParams {
            tau: default_tau(),
            max_points: default_max_points(),
            eps_max: None,
            max_dim: default_max_dim(),
        }
    }
}

/// Grayscale one image (after optional noise) and compute its persistence
/// diagrams.
pub fn image_features(
    img: &Image,
    params: &ExtractParams,
    noise: Option<&NoiseSpec>,
) -> Result<ImageFeatures, PipelineError> {
    let noisy;
    let img = match noise {
        Some(spec) => {
            noisy = add_gaussian_noise(img, spec);
            &noisy
        }
        None => img,
    };
    let gray = to_grayscale(img)?;
    let cloud = image_to_point_cloud(&gray, params.tau, params.max_points);
    let eps_used = params.eps_max.unwrap_or_else(|| cloud.diameter());
    let filt = build_rips_filtration(&pairwise_distances(&cloud), eps_used, params.max_dim)?;
    let diagrams = compute_persistence(&filt)?;
    Ok(ImageFeatures { gray, diagrams, eps_used })
}

/// Extract features for every image, in parallel, output in input order.
/// When noise is given, image `i` uses the sub-seed
/// `indexed_seed(stream_seed(master_seed, STREAM_NOISE), i)`.
pub fn extract_all(
    images: &[Image],
    params: &ExtractParams,
    noise: Option<&NoiseSpec>,
    master_seed: u64,
    par: Parallelism,
) -> Result<Vec<ImageFeatures>, PipelineError> {
    let noise_stream = stream_seed(master_seed, STREAM_NOISE);
    let results = map_indices(par, images.len(), |i| {
        let per_image = noise.map(|spec| NoiseSpec {
            seed: indexed_seed(noise_stream, i as u64),
            ..*spec
        });
        image_features(&images[i], params, per_image.as_ref())
    });
    results.into_iter().collect()
}

/// Fused feature row for one image at a given (alpha, beta).
pub fn fused_row(feat: &ImageFeatures, alpha: usize, beta: usize) -> Vec<f64> {
    let pix = flatten_pixels(&feat.gray.data, beta);
    let topo = vectorize_diagrams(&feat.diagrams, alpha, feat.eps_used);
    fuse(&pix, &topo).values
}

/// Experiment configuration (JSON file mirrors these fields).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    #[serde(default, flatten)]
    pub extract: ExtractParams,
    /// Fractions of the full topological length, swept as fused variants.
    #[serde(default = "default_alpha_fractions")]
    pub alpha_fractions: Vec<f64>,
    /// Pixel truncation grid step; the grid is step, 2*step, ... capped at
    /// the full pixel length.
    #[serde(default = "default_beta_step")]
    pub beta_step: usize,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub train: TrainParams,
    #[serde(default = "default_split_ratio")]
    pub split_ratio: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_alpha_fractions() -> Vec<f64> {
    vec![0.2, 0.4, 0.6, 0.8, 1.0]
}
fn default_beta_step() -> usize {
    1000
}
fn default_split_ratio() -> f64 {
    0.8
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    PixelOnly,
    Fused,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::PixelOnly => "pixel_only",
            Mode::Fused => "fused",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReportRow {
    pub alpha: usize,
    pub beta: usize,
    pub mode: Mode,
    pub report: EvalReport,
}

#[derive(Debug)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    /// Index into `rows` of the best fused cell (highest accuracy, first on
    /// ties).
    pub best_fused: Option<usize>,
    /// The trained model of the best fused cell.
    pub best_model: Option<BoostedEnsemble>,
    pub num_classes: usize,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,beta,mode,accuracy,precision,recall,f1\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.alpha,
                row.beta,
                row.mode.as_str(),
                row.report.accuracy,
                row.report.precision,
                row.report.recall,
                row.report.f1
            ));
        }
        out
    }

    /// Pixel-only accuracy at the same beta as the best fused cell.
    pub fn baseline_for_best(&self) -> Option<&ReportRow> {
        let best = &self.rows[self.best_fused?];
        self.rows
            .iter()
            .find(|r| r.mode == Mode::PixelOnly && r.beta == best.beta)
    }
}

/// Grid of pixel truncation lengths: multiples of `step` capped at `full`.
pub fn beta_grid(step: usize, full: usize) -> Vec<usize> {
    assert!(step >= 1);
    let mut grid: Vec<usize> = (1..)
        .map(|k| k * step)
        .take_while(|&b| b < full)
        .collect();
    if full > 0 {
        grid.push(full);
    }
    grid
}

/// Topological truncation lengths: `ceil(frac * alpha_full)` per fraction.
pub fn alpha_grid(fractions: &[f64], alpha_full: usize) -> Vec<usize> {
    fractions
        .iter()
        .map(|&f| (f * alpha_full as f64).ceil() as usize)
        .collect()
}

/// Run the full sweep: extract once, then per (beta) a pixel-only baseline
/// and per (alpha, beta) a fused cell, each trained on the same stratified
/// split and evaluated on the held-out samples.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    par: Parallelism,
) -> Result<ExperimentReport, PipelineError> {
    let manifest = ingest_dataset(&cfg.dataset)?;
    if manifest.samples.is_empty() {
        return Err(PipelineError::DatasetEmpty);
    }
    let num_classes = manifest.num_classes();
    if num_classes < 2 {
        return Err(PipelineError::SingleClass);
    }
    for f in &cfg.alpha_fractions {
        if !(0.0..=1.0).contains(f) {
            return Err(PipelineError::BadConfig(format!("alpha fraction {f} outside [0,1]")));
        }
    }
    if !(cfg.split_ratio > 0.0 && cfg.split_ratio < 1.0) {
        return Err(PipelineError::BadConfig("split ratio must be in (0,1)".into()));
    }

    let labels = manifest.labels();
    let images: Vec<Image> = manifest.samples.iter().map(|s| s.image.clone()).collect();
    let features = extract_all(&images, &cfg.extract, cfg.noise.as_ref(), cfg.seed, par)?;

    let full_pixels = features.iter().map(|f| f.gray.data.len()).min().unwrap();
    let alpha_full = features
        .iter()
        .map(|f| 2 * f.diagrams.iter().map(|d| d.pairs.len()).sum::<usize>())
        .max()
        .unwrap();
    let betas = beta_grid(cfg.beta_step, full_pixels);
    let alphas = alpha_grid(&cfg.alpha_fractions, alpha_full);

    let (train_idx, test_idx) = stratified_split(&labels, cfg.split_ratio, cfg.seed);
    let y_train: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
    let y_test: Vec<usize> = test_idx.iter().map(|&i| labels[i]).collect();

    let objective = if num_classes == 2 {
        Objective::Binary
    } else {
        Objective::Multiclass { num_class: num_classes }
    };
    let averaging = if num_classes == 2 {
        Averaging::Binary { positive: 1 }
    } else {
        Averaging::Micro
    };
    let params = TrainParams { objective: Some(objective), ..cfg.train.clone() };

    let mut rows = Vec::new();
    let mut best_fused: Option<usize> = None;
    let mut best_model: Option<BoostedEnsemble> = None;

    for &beta in &betas {
        for (mode, alpha) in std::iter::once((Mode::PixelOnly, 0))
            .chain(alphas.iter().map(|&a| (Mode::Fused, a)))
        {
            let build = |idx: &[usize]| {
                FeatureMatrix::from_rows(
                    idx.iter().map(|&i| fused_row(&features[i], alpha, beta)).collect(),
                )
            };
            let x_train = build(&train_idx);
            let x_test = build(&test_idx);
            let model = gbdt::train_with_parallelism(&x_train, &y_train, &params, par)?;
            let predicted = gbdt::predict_labels(&model, &x_test)?;
            let report = evaluate(&predicted, &y_test, averaging)?;
            rows.push(ReportRow { alpha, beta, mode, report });
            if mode == Mode::Fused {
                let idx = rows.len() - 1;
                let better = match best_fused {
                    None => true,
                    Some(b) => rows[idx].report.accuracy > rows[b].report.accuracy,
                };
                if better {
                    best_fused = Some(idx);
                    best_model = Some(model);
                }
            }
        }
    }

    Ok(ExperimentReport { rows, best_fused, best_model, num_classes })
}

/// Feature CSV: header `label,f0,...`, one row per sample.
pub fn features_to_csv(x: &FeatureMatrix, labels: &[usize]) -> String {
    let mut out = String::from("label");
    for f in 0..x.cols {
        out.push_str(&format!(",f{f}"));
    }
    out.push('\n');
    for (r, &label) in labels.iter().enumerate() {
        out.push_str(&label.to_string());
        for v in x.row(r) {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// Parse the feature CSV back into a matrix and labels.
pub fn features_from_csv(text: &str) -> Result<(FeatureMatrix, Vec<usize>), PipelineError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(PipelineError::EmptyInput)?;
    if !header.starts_with("label") {
        return Err(PipelineError::BadFeatureCsv("missing `label` header".into()));
    }
    let n_features = header.split(',').count() - 1;
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let label: usize = fields
            .next()
            .unwrap()
            .trim()
            .parse()
            .map_err(|e| PipelineError::BadFeatureCsv(format!("line {}: {e}", lineno + 2)))?;
        let row: Result<Vec<f64>, _> = fields.map(|f| f.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| PipelineError::BadFeatureCsv(format!("line {}: {e}", lineno + 2)))?;
        if row.len() != n_features {
            return Err(PipelineError::BadFeatureCsv(format!(
                "line {}: expected {n_features} features, got {}",
                lineno + 2,
                row.len()
            )));
        }
        labels.push(label);
        rows.push(row);
    }
    Ok((FeatureMatrix::from_rows(rows), labels))
}
