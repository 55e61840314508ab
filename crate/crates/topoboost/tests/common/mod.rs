//! Independent reference implementations used as oracles by the property
//! and acceptance suites. Everything here recomputes results from first
//! principles (dense GF(2) Gaussian elimination, exhaustive enumeration,
//! brute-force matching) without touching the library's optimized paths.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topoboost::image_topo::Image;
use topoboost::ph::{Filtration, PersistencePair, PointCloud};

// ---------------------------------------------------------------------------
// naive GF(2) boundary-matrix reduction
// ---------------------------------------------------------------------------

/// Plain left-to-right column reduction on a dense boolean boundary matrix,
/// no clearing, no sparse columns. Returns (birth, death) pairs per
/// dimension `0..max_dim`, zero-persistence pairs dropped, essentials with
/// infinite death.
pub fn naive_persistence(filt: &Filtration) -> Vec<Vec<(f64, f64)>> {
    let m = filt.entries.len();
    let index_of: std::collections::HashMap<_, usize> = filt
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.simplex.clone(), i))
        .collect();
    // dense columns[j][i]
    let mut matrix = vec![vec![false; m]; m];
    for (j, entry) in filt.entries.iter().enumerate() {
        for face in entry.simplex.facets() {
            matrix[j][index_of[&face]] = true;
        }
    }
    let low = |col: &Vec<bool>| col.iter().rposition(|&x| x);
    let mut low_to_col: Vec<Option<usize>> = vec![None; m];
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut paired = vec![false; m];
    for j in 0..m {
        loop {
            match low(&matrix[j]) {
                None => break,
                Some(l) => match low_to_col[l] {
                    None => {
                        low_to_col[l] = Some(j);
                        pairs.push((l, j));
                        paired[l] = true;
                        paired[j] = true;
                        break;
                    }
                    Some(k) => {
                        let other = matrix[k].clone();
                        for (slot, &bit) in matrix[j].iter_mut().zip(&other) {
                            *slot ^= bit;
                        }
                    }
                },
            }
        }
    }
    let mut out = vec![Vec::new(); filt.max_dim];
    for (birth_idx, death_idx) in pairs {
        let dim = filt.entries[birth_idx].simplex.dim();
        let birth = filt.entries[birth_idx].appearance;
        let death = filt.entries[death_idx].appearance;
        if dim < filt.max_dim && birth < death {
            out[dim].push((birth, death));
        }
    }
    for j in 0..m {
        if !paired[j] {
            let dim = filt.entries[j].simplex.dim();
            if dim < filt.max_dim {
                out[dim].push((filt.entries[j].appearance, f64::INFINITY));
            }
        }
    }
    for d in &mut out {
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    }
    out
}

/// Sorted (birth, death) multiset of one library diagram for comparison
/// against the oracle.
pub fn diagram_multiset(pairs: &[PersistencePair]) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = pairs.iter().map(|p| (p.birth, p.death)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    v
}

// ---------------------------------------------------------------------------
// GF(2) rank / Betti numbers of a sub-complex at a threshold
// ---------------------------------------------------------------------------

fn gf2_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let width = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..width {
        if let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col]) {
            rows.swap(rank, pivot);
            for r in 0..rows.len() {
                if r != rank && rows[r][col] {
                    let pivot_row = rows[rank].clone();
                    for (slot, &bit) in rows[r].iter_mut().zip(&pivot_row) {
                        *slot ^= bit;
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Betti number of dimension `dim` of the sub-complex of all simplices with
/// appearance <= t, computed by rank-nullity over GF(2).
pub fn betti_at(filt: &Filtration, dim: usize, t: f64) -> usize {
    let simplices: Vec<_> = filt
        .entries
        .iter()
        .filter(|e| e.appearance <= t)
        .map(|e| e.simplex.clone())
        .collect();
    let of_dim = |d: usize| -> Vec<_> {
        simplices.iter().filter(|s| s.dim() == d).cloned().collect()
    };
    let boundary_rank = |d: usize| -> usize {
        // rank of the boundary map from d-simplices to (d-1)-simplices
        let rows_basis = of_dim(d.wrapping_sub(1));
        let cols_basis = of_dim(d);
        if d == 0 || rows_basis.is_empty() || cols_basis.is_empty() {
            return 0;
        }
        let row_index: std::collections::HashMap<_, usize> = rows_basis
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let rows: Vec<Vec<bool>> = cols_basis
            .iter()
            .map(|s| {
                let mut row = vec![false; rows_basis.len()];
                for face in s.facets() {
                    row[row_index[&face]] = true;
                }
                row
            })
            .collect();
        gf2_rank(rows)
    };
    let n_dim = of_dim(dim).len();
    n_dim - boundary_rank(dim) - boundary_rank(dim + 1)
}

// ---------------------------------------------------------------------------
// brute-force bottleneck matching
// ---------------------------------------------------------------------------

fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    let d_death = if a.1.is_infinite() && b.1.is_infinite() {
        0.0
    } else {
        (a.1 - b.1).abs()
    };
    (a.0 - b.0).abs().max(d_death)
}

fn diag_cost(p: (f64, f64)) -> f64 {
    if p.1.is_infinite() {
        f64::INFINITY
    } else {
        (p.1 - p.0) / 2.0
    }
}

fn bottleneck_rec(i: usize, used: u32, a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    if i == a.len() {
        let mut worst = 0.0f64;
        for (j, &p) in b.iter().enumerate() {
            if used & (1 << j) == 0 {
                worst = worst.max(diag_cost(p));
            }
        }
        return worst;
    }
    let mut best = bottleneck_rec(i + 1, used, a, b).max(diag_cost(a[i]));
    for j in 0..b.len() {
        if used & (1 << j) == 0 {
            let c = linf(a[i], b[j]).max(bottleneck_rec(i + 1, used | (1 << j), a, b));
            best = best.min(c);
        }
    }
    best
}

/// Exact bottleneck distance between two small diagrams; points may match
/// to the diagonal at half their persistence.
pub fn bottleneck_distance(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    assert!(b.len() <= 31, "brute force only handles small diagrams");
    bottleneck_rec(0, 0, a, b)
}

// ---------------------------------------------------------------------------
// quadratic farthest-point-sampling reference
// ---------------------------------------------------------------------------

/// Straightforward O(k * n^2) max-min subsample: recompute every candidate's
/// distance to the whole selected set each round; ties pick the smallest
/// (row, col).
pub fn fps_reference(candidates: &[(usize, usize)], k: usize) -> Vec<(usize, usize)> {
    let dist = |a: (usize, usize), b: (usize, usize)| -> f64 {
        let dr = a.0 as f64 - b.0 as f64;
        let dc = a.1 as f64 - b.1 as f64;
        dr * dr + dc * dc
    };
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    let mut selected = vec![sorted[0]];
    while selected.len() < k {
        let mut best: Option<((usize, usize), f64)> = None;
        for &cand in &sorted {
            if selected.contains(&cand) {
                continue;
            }
            let d = selected
                .iter()
                .map(|&s| dist(cand, s))
                .fold(f64::INFINITY, f64::min);
            let take = match best {
                None => true,
                Some((b_pt, b_d)) => d > b_d || (d == b_d && cand < b_pt),
            };
            if take {
                best = Some((cand, d));
            }
        }
        selected.push(best.unwrap().0);
    }
    selected
}

// ---------------------------------------------------------------------------
// exhaustive split enumeration
// ---------------------------------------------------------------------------

/// Best (feature, bin) split by scanning every candidate over the raw
/// per-sample bins, with the declared tie-break (higher gain, then lower
/// feature, then lower bin).
pub fn exhaustive_best_split(
    bins: &[Vec<u16>],
    n_bins: &[usize],
    grad: &[f64],
    hess: &[f64],
    min_data_in_leaf: usize,
    l2_lambda: f64,
) -> Option<(usize, u16, f64)> {
    let n = grad.len();
    let term = |g: f64, h: f64| {
        if h + l2_lambda > 0.0 {
            g * g / (h + l2_lambda)
        } else {
            0.0
        }
    };
    let mut best: Option<(usize, u16, f64)> = None;
    for f in 0..bins.len() {
        for t in 0..n_bins[f].saturating_sub(1) {
            let (mut gl, mut hl, mut nl) = (0.0, 0.0, 0usize);
            for i in 0..n {
                if (bins[f][i] as usize) <= t {
                    gl += grad[i];
                    hl += hess[i];
                    nl += 1;
                }
            }
            if nl < min_data_in_leaf || n - nl < min_data_in_leaf {
                continue;
            }
            let (g, h): (f64, f64) = (grad.iter().sum(), hess.iter().sum());
            let gain = term(gl, hl) + term(g - gl, h - hl) - term(g, h);
            if gain > 0.0 && best.map_or(true, |(_, _, bg)| gain > bg) {
                best = Some((f, t as u16, gain));
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// data generators
// ---------------------------------------------------------------------------

/// Uniform random cloud in the unit square.
pub fn random_cloud(rng: &mut ChaCha8Rng, max_points: usize) -> PointCloud {
    let n = rng.gen_range(1..=max_points);
    PointCloud::new((0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect())
}

/// 28x28 grayscale image of one dark shape on a light background.
fn shape_image(rng: &mut ChaCha8Rng, annulus: bool) -> Image {
    let size = 28usize;
    let cx = 13.5 + rng.gen_range(-2.0..2.0);
    let cy = 13.5 + rng.gen_range(-2.0..2.0);
    let radius = rng.gen_range(6.0..9.5);
    let thickness = rng.gen_range(1.2..2.2);
    let data = (0..size * size)
        .map(|p| {
            let (row, col) = ((p / size) as f64, (p % size) as f64);
            let d = ((row - cy).powi(2) + (col - cx).powi(2)).sqrt();
            let dark = if annulus {
                (d - radius).abs() <= thickness
            } else {
                d <= radius
            };
            if dark {
                0.08
            } else {
                0.95
            }
        })
        .collect();
    Image::new(size, size, 1, data).unwrap()
}

/// Write a disks-vs-annuli dataset (`root/annulus`, `root/disk`) of
/// `per_class` PNGs each, seeded.
pub fn write_disks_vs_annuli(root: &std::path::Path, per_class: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (class, annulus) in [("annulus", true), ("disk", false)] {
        let dir = root.join(class);
        std::fs::create_dir_all(&dir).unwrap();
        for i in 0..per_class {
            let img = shape_image(&mut rng, annulus);
            topoboost::dataset::save_image_png(&img, &dir.join(format!("{i:03}.png"))).unwrap();
        }
    }
}

/// Seeded Gaussian blob dataset: `per_class` points per class around
/// well-separated 2-D centers with unit-ish spread.
pub fn gaussian_blobs(
    centers: &[(f64, f64)],
    per_class: usize,
    sigma: f64,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = rand_distr::Normal::new(0.0, sigma).unwrap();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (label, &(cx, cy)) in centers.iter().enumerate() {
        for _ in 0..per_class {
            use rand_distr::Distribution;
            rows.push(vec![cx + normal.sample(&mut rng), cy + normal.sample(&mut rng)]);
            labels.push(label);
        }
    }
    (rows, labels)
}
