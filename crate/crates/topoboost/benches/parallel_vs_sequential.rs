//! Parallel vs sequential throughput of the data-parallel inner loops:
//! per-image feature extraction and boosted-tree training.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use topoboost::gbdt::{train_with_parallelism, FeatureMatrix, Objective, TrainParams};
use topoboost::image_topo::Image;
use topoboost::parallel::Parallelism;
use topoboost::pipeline::{extract_all, ExtractParams, NoiseSpec};
use topoboost::seed::splitmix64;

fn modes() -> Vec<(&'static str, Parallelism)> {
    let mut m = vec![("sequential", Parallelism::Sequential)];
    #[cfg(feature = "parallel")]
    m.push(("rayon", Parallelism::Rayon));
    m
}

/// Synthetic 28x28 gray images: a dark ring on a light background.
fn ring_images(n: usize) -> Vec<Image> {
    (0..n)
        .map(|i| {
            let r0 = 6.0 + (splitmix64(i as u64) % 5) as f64;
            let data = (0..28 * 28)
                .map(|p| {
                    let (row, col) = (p / 28, p % 28);
                    let d = ((row as f64 - 14.0).powi(2) + (col as f64 - 14.0).powi(2)).sqrt();
                    if (d - r0).abs() < 1.5 {
                        0.05
                    } else {
                        0.95
                    }
                })
                .collect();
            Image::new(28, 28, 1, data).unwrap()
        })
        .collect()
}

fn bench_extract(c: &mut Criterion) {
    let images = ring_images(48);
    let params = ExtractParams { max_points: 40, ..ExtractParams::default() };
    let noise = NoiseSpec { mean: 0.0, sigma: 0.1, seed: 0 };
    let mut group = c.benchmark_group("extract_features_48x28x28");
    group.sample_size(10);
    for (name, par) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, &par| {
            b.iter(|| extract_all(&images, &params, Some(&noise), 7, par).unwrap())
        });
    }
    group.finish();
}

fn bench_train(c: &mut Criterion) {
    let n = 400;
    let cols = 64;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..cols)
                .map(|j| (splitmix64((i * cols + j) as u64) % 1000) as f64 / 1000.0)
                .collect()
        })
        .collect();
    let y: Vec<usize> = rows.iter().map(|r| usize::from(r[0] + r[1] > 1.0)).collect();
    let x = FeatureMatrix::from_rows(rows);
    let params = TrainParams {
        num_trees: 20,
        min_data_in_leaf: 5,
        objective: Some(Objective::Binary),
        ..TrainParams::default()
    };
    let mut group = c.benchmark_group("train_400x64_20trees");
    group.sample_size(10);
    for (name, par) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, &par| {
            b.iter(|| train_with_parallelism(&x, &y, &params, par).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_extract, bench_train);
criterion_main!(benches);
