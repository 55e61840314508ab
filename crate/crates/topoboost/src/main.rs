//! Command-line surface: feature extraction, training, prediction,
//! evaluation, noise injection, diagram/Betti plots, and the truncation-sweep
//! experiment.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use topoboost::dataset::{ingest_dataset, save_image_png};
use topoboost::gbdt::{self, BoostedEnsemble, Objective, TrainParams};
use topoboost::image_topo::betti_curve_to_csv;
use topoboost::parallel::Parallelism;
use topoboost::ph::{
    build_rips_filtration, compute_persistence, diagrams_to_csv, pairwise_distances,
    parse_cloud_csv,
};
use topoboost::pipeline::{
    self, evaluate, extract_all, features_from_csv, features_to_csv, fused_row, Averaging,
    ExperimentConfig, ExtractParams, NoiseSpec,
};
use topoboost::plot::{emit_persistence_svg, PlotSpec};
use topoboost::seed::{indexed_seed, stream_seed, STREAM_NOISE};

/// Topological-feature-augmented gradient boosting toolkit.
///
/// All randomness flows from a single --seed value. Sub-seeds are derived
/// per stream with SplitMix64: stream_seed(seed, STREAM) =
/// splitmix64(seed ^ splitmix64(STREAM)), with fixed stream ids for the
/// train/test split, per-image noise, and synthetic sampling; per-image
/// seeds are splitmix64(stream_seed ^ splitmix64(image_index)).
#[derive(Parser)]
#[command(name = "topoboost", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ExtractArgs {
    /// Dataset root: one subdirectory per class with PNG/BMP images.
    #[arg(long)]
    input: PathBuf,
    /// Output feature CSV.
    #[arg(long)]
    out: PathBuf,
    /// Foreground threshold: pixels darker than tau join the point cloud.
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    /// Farthest-point-sampling cap on the cloud size.
    #[arg(long, default_value_t = 100)]
    max_points: usize,
    /// Filtration cap; default is each image's own cloud diameter.
    #[arg(long)]
    eps_max: Option<f64>,
    /// Top simplex dimension (1 or 2).
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    /// Topological truncation length.
    #[arg(long, default_value_t = 0)]
    alpha: usize,
    /// Pixel truncation length (clamped to the image size).
    #[arg(long, default_value_t = usize::MAX)]
    beta: usize,
    /// Emit only the train or test half of the stratified split.
    #[arg(long, value_parser = ["train", "test", "all"], default_value = "all")]
    split: String,
    #[arg(long, default_value_t = 0.8)]
    split_ratio: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TrainArgs {
    /// Feature CSV produced by `extract`.
    #[arg(long)]
    input: PathBuf,
    /// Output model JSON.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = ["binary", "multiclass"], default_value = "binary")]
    objective: String,
    #[arg(long, default_value_t = 100)]
    num_trees: usize,
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
    #[arg(long, default_value_t = 31)]
    max_leaves: usize,
    /// Minimum samples per leaf.
    #[arg(long = "min-leaf", default_value_t = 20)]
    min_leaf: usize,
    /// L2 regularization on leaf values.
    #[arg(long = "lambda", default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 256)]
    max_bins: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PredictArgs {
    /// Model JSON from `train`.
    #[arg(long)]
    model: PathBuf,
    /// Feature CSV to score.
    #[arg(long)]
    input: PathBuf,
    /// Output CSV: predicted label plus per-class probabilities.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Labeled feature CSV.
    #[arg(long)]
    input: PathBuf,
    /// Optional metrics CSV; metrics always print to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NoiseArgs {
    /// Dataset root to corrupt.
    #[arg(long)]
    input: PathBuf,
    /// Output dataset root (same class layout, PNG files).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    mean: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PdPlotArgs {
    /// Point-cloud CSV with header `x,y`.
    #[arg(long)]
    input: PathBuf,
    /// Output SVG.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    eps_max: Option<f64>,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    /// Also write the diagram CSV next to the SVG when set.
    #[arg(long)]
    csv_out: Option<PathBuf>,
}

#[derive(Args)]
struct BettiArgs {
    /// Point-cloud CSV with header `x,y`.
    #[arg(long)]
    input: PathBuf,
    /// Output CSV with header `t,count`.
    #[arg(long)]
    out: PathBuf,
    /// Homology dimension of the curve.
    #[arg(long, default_value_t = 0)]
    dim: usize,
    #[arg(long)]
    eps_max: Option<f64>,
    /// Number of uniform grid thresholds over [0, eps_max].
    #[arg(long, default_value_t = 100)]
    grid_points: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output report CSV.
    #[arg(long)]
    out: PathBuf,
    /// Save the best fused model here.
    #[arg(long)]
    model_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract fused pixel+topology feature vectors from a dataset.
    Extract(ExtractArgs),
    /// Train a boosted-tree model on a feature CSV.
    Train(TrainArgs),
    /// Score a feature CSV with a trained model.
    Predict(PredictArgs),
    /// Evaluate a model against labeled features.
    Eval(EvalArgs),
    /// Write a noise-corrupted copy of a dataset.
    Noise(NoiseArgs),
    /// Plot the persistence diagram of a point cloud as SVG.
    PdPlot(PdPlotArgs),
    /// Write the Betti curve of a point cloud.
    Betti(BettiArgs),
    /// Run the full alpha/beta truncation sweep.
    Experiment(ExperimentArgs),
}

#[derive(Debug)]
struct DataError(String);

impl std::fmt::Display for DataError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl<E: std::error::Error> From<E> for DataError {
    fn from(e: E) -> Self {
        DataError(e.to_string())
    }
}

fn write(path: &PathBuf, contents: &str) -> Result<(), DataError> {
    fs::write(path, contents).map_err(|e| DataError(format!("{}: {e}", path.display())))
}

fn read(path: &PathBuf) -> Result<String, DataError> {
    fs::read_to_string(path).map_err(|e| DataError(format!("{}: {e}", path.display())))
}

fn diagrams_of_cloud_csv(
    path: &PathBuf,
    eps_max: Option<f64>,
    max_dim: usize,
) -> Result<(Vec<topoboost::ph::PersistenceDiagram>, f64), DataError> {
    let cloud = parse_cloud_csv(&read(path)?).map_err(DataError)?;
    let eps = eps_max.unwrap_or_else(|| cloud.diameter());
    let filt = build_rips_filtration(&pairwise_distances(&cloud), eps, max_dim)?;
    Ok((compute_persistence(&filt)?, eps))
}

fn run_extract(args: &ExtractArgs) -> Result<(), DataError> {
    let manifest = ingest_dataset(&args.input)?;
    if manifest.samples.is_empty() {
        return Err(DataError("empty dataset".into()));
    }
    let params = ExtractParams {
        tau: args.tau,
        max_points: args.max_points,
        eps_max: args.eps_max,
        max_dim: args.max_dim,
    };
    let images: Vec<_> = manifest.samples.iter().map(|s| s.image.clone()).collect();
    let features = extract_all(&images, &params, None, args.seed, Parallelism::default())?;
    let labels = manifest.labels();
    let selected: Vec<usize> = match args.split.as_str() {
        "all" => (0..labels.len()).collect(),
        half => {
            let (train, test) = pipeline::stratified_split(&labels, args.split_ratio, args.seed);
            if half == "train" {
                train
            } else {
                test
            }
        }
    };
    let rows: Vec<Vec<f64>> = selected
        .iter()
        .map(|&i| fused_row(&features[i], args.alpha, args.beta))
        .collect();
    let x = gbdt::FeatureMatrix::from_rows(rows);
    let y: Vec<usize> = selected.iter().map(|&i| labels[i]).collect();
    write(&args.out, &features_to_csv(&x, &y))
}

fn run_train(args: &TrainArgs) -> Result<(), DataError> {
    let (x, y) = features_from_csv(&read(&args.input)?)?;
    if x.rows == 0 {
        return Err(DataError("empty dataset".into()));
    }
    let objective = match args.objective.as_str() {
        "binary" => Objective::Binary,
        _ => Objective::Multiclass { num_class: y.iter().max().unwrap() + 1 },
    };
    let params = TrainParams {
        num_trees: args.num_trees,
        learning_rate: args.learning_rate,
        max_leaves: args.max_leaves,
        min_data_in_leaf: args.min_leaf,
        l2_lambda: args.lambda,
        max_bins: args.max_bins,
        objective: Some(objective),
        seed: args.seed,
    };
    let model = gbdt::train(&x, &y, &params)?;
    write(&args.out, &model.to_json())
}

fn load_model(path: &PathBuf) -> Result<BoostedEnsemble, DataError> {
    Ok(BoostedEnsemble::from_json(&read(path)?)?)
}

fn run_predict(args: &PredictArgs) -> Result<(), DataError> {
    let model = load_model(&args.model)?;
    let (x, _) = features_from_csv(&read(&args.input)?)?;
    let labels = gbdt::predict_labels(&model, &x)?;
    let proba = gbdt::predict_proba(&model, &x)?;
    let mut out = String::from("pred");
    for k in 0..proba.first().map_or(0, |r| r.len()) {
        out.push_str(&format!(",p{k}"));
    }
    out.push('\n');
    for (label, row) in labels.iter().zip(&proba) {
        out.push_str(&label.to_string());
        for p in row {
            out.push_str(&format!(",{p}"));
        }
        out.push('\n');
    }
    write(&args.out, &out)
}

fn run_eval(args: &EvalArgs) -> Result<(), DataError> {
    let model = load_model(&args.model)?;
    let (x, y) = features_from_csv(&read(&args.input)?)?;
    let predicted = gbdt::predict_labels(&model, &x)?;
    let averaging = match model.objective {
        Objective::Binary => Averaging::Binary { positive: 1 },
        Objective::Multiclass { .. } => Averaging::Micro,
    };
    let r = evaluate(&predicted, &y, averaging)?;
    let text = format!(
        "accuracy,precision,recall,f1\n{},{},{},{}\n",
        r.accuracy, r.precision, r.recall, r.f1
    );
    print!("{text}");
    if let Some(out) = &args.out {
        write(out, &text)?;
    }
    Ok(())
}

fn run_noise(args: &NoiseArgs) -> Result<(), DataError> {
    let manifest = ingest_dataset(&args.input)?;
    let noise_stream = stream_seed(args.seed, STREAM_NOISE);
    for (i, sample) in manifest.samples.iter().enumerate() {
        let spec = NoiseSpec {
            mean: args.mean,
            sigma: args.sigma,
            seed: indexed_seed(noise_stream, i as u64),
        };
        let noisy = pipeline::add_gaussian_noise(&sample.image, &spec);
        let class = &manifest.classes[sample.label];
        let dir = args.out.join(class);
        fs::create_dir_all(&dir).map_err(|e| DataError(format!("{}: {e}", dir.display())))?;
        let stem = sample
            .path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| i.to_string());
        save_image_png(&noisy, &dir.join(format!("{stem}.png")))?;
    }
    Ok(())
}

fn run_pd_plot(args: &PdPlotArgs) -> Result<(), DataError> {
    let (diags, _) = diagrams_of_cloud_csv(&args.input, args.eps_max, args.max_dim)?;
    let svg = emit_persistence_svg(&diags, &PlotSpec::default());
    write(&args.out, &svg)?;
    if let Some(csv_out) = &args.csv_out {
        write(csv_out, &diagrams_to_csv(&diags))?;
    }
    Ok(())
}

fn run_betti(args: &BettiArgs) -> Result<(), DataError> {
    if args.grid_points < 2 {
        return Err(DataError("need at least 2 grid points".into()));
    }
    let (diags, eps) = diagrams_of_cloud_csv(&args.input, args.eps_max, args.dim + 1)?;
    let diag = diags
        .into_iter()
        .find(|d| d.dim == args.dim)
        .ok_or_else(|| DataError(format!("dimension {} not computed", args.dim)))?;
    let span = if eps > 0.0 { eps } else { 1.0 };
    let grid: Vec<f64> = (0..args.grid_points)
        .map(|i| i as f64 * span / (args.grid_points - 1) as f64)
        .collect();
    let curve = topoboost::image_topo::betti_curve(&diag, &grid);
    write(&args.out, &betti_curve_to_csv(&curve))
}

fn run_experiment(args: &ExperimentArgs) -> Result<(), DataError> {
    let mut cfg: ExperimentConfig = serde_json::from_str(&read(&args.config)?)
        .map_err(|e| DataError(format!("{}: {e}", args.config.display())))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let report = pipeline::run_experiment(&cfg, Parallelism::default())?;
    write(&args.out, &report.to_csv())?;
    if let Some(best) = report.best_fused {
        let row = &report.rows[best];
        println!(
            "best fused: alpha={} beta={} accuracy={}",
            row.alpha, row.beta, row.report.accuracy
        );
        if let Some(base) = report.baseline_for_best() {
            println!(
                "pixel-only baseline at beta={}: accuracy={}",
                base.beta, base.report.accuracy
            );
        }
        if let (Some(path), Some(model)) = (&args.model_out, &report.best_model) {
            write(path, &model.to_json())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not usage errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Extract(args) => run_extract(args),
        Command::Train(args) => run_train(args),
        Command::Predict(args) => run_predict(args),
        Command::Eval(args) => run_eval(args),
        Command::Noise(args) => run_noise(args),
        Command::PdPlot(args) => run_pd_plot(args),
        Command::Betti(args) => run_betti(args),
        Command::Experiment(args) => run_experiment(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
