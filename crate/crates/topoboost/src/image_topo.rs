//! Image to topological-feature conversion: grayscale, foreground point-cloud
//! extraction with farthest-point subsampling, Betti curves, and persistence
//! diagram vectorization with truncation to a fixed length.

use thiserror::Error;

use crate::ph::{PersistenceDiagram, PointCloud};

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("unsupported channel count {0} (expected 1 or 3)")]
    BadChannelCount(usize),
    #[error("data length {got} does not match {h}x{w}x{c}")]
    BadDataLength { got: usize, h: usize, w: usize, c: usize },
}

/// Row-major image with interleaved channels, intensities in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

impl Image {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self, ImageError> {
        if channels != 1 && channels != 3 {
            return Err(ImageError::BadChannelCount(channels));
        }
        if data.len() != height * width * channels {
            return Err(ImageError::BadDataLength { got: data.len(), h: height, w: width, c: channels });
        }
        Ok(Image { height, width, channels, data })
    }
}

/// Single-channel image, intensities in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl GrayImage {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }
}

/// BT.601 luminance conversion; single-channel input is copied through.
pub fn to_grayscale(img: &Image) -> Result<GrayImage, ImageError> {
    let data = match img.channels {
        1 => img.data.clone(),
        3 => img
            .data
            .chunks_exact(3)
            .map(|px| 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2])
            .collect(),
        c => return Err(ImageError::BadChannelCount(c)),
    };
    Ok(GrayImage { height: img.height, width: img.width, data })
}

/// Foreground point cloud: pixels darker than `tau`, as (row, col) points.
///
/// When more than `max_points` pixels qualify, the set is reduced by
/// farthest-point sampling seeded at the lexicographically smallest
/// foreground pixel; ties in the max-min distance pick the smallest
/// (row, col). The returned cloud is ordered by (row, col) either way, so
/// the result is independent of scheduling.
pub fn image_to_point_cloud(g: &GrayImage, tau: f64, max_points: usize) -> PointCloud {
    assert!((0.0..=1.0).contains(&tau));
    assert!(max_points >= 1);
    let mut fg: Vec<(usize, usize)> = Vec::new();
    for r in 0..g.height {
        for c in 0..g.width {
            if g.get(r, c) < tau {
                fg.push((r, c));
            }
        }
    }
    if fg.len() > max_points {
        fg = farthest_point_sample(&fg, max_points);
        fg.sort_unstable();
    }
    PointCloud::new(fg.into_iter().map(|(r, c)| (r as f64, c as f64)).collect())
}

fn sq_dist(a: (usize, usize), b: (usize, usize)) -> f64 {
    let dr = a.0 as f64 - b.0 as f64;
    let dc = a.1 as f64 - b.1 as f64;
    dr * dr + dc * dc
}

/// Greedy max-min subsample of `k` points, seeded at `candidates[0]`
/// (candidates are already in (row, col) order).
fn farthest_point_sample(candidates: &[(usize, usize)], k: usize) -> Vec<(usize, usize)> {
    let mut selected = vec![candidates[0]];
    let mut min_d: Vec<f64> = candidates.iter().map(|&p| sq_dist(p, candidates[0])).collect();
    while selected.len() < k {
        let mut best = 0usize;
        for i in 1..candidates.len() {
            if min_d[i] > min_d[best] {
                best = i;
            }
            // equal distances fall through: the earlier (row, col) wins
        }
        let chosen = candidates[best];
        selected.push(chosen);
        for i in 0..candidates.len() {
            let d = sq_dist(candidates[i], chosen);
            if d < min_d[i] {
                min_d[i] = d;
            }
        }
    }
    selected
}

/// Betti curve of one diagram on a strictly increasing threshold grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BettiCurve {
    pub dim: usize,
    pub grid: Vec<f64>,
    pub values: Vec<usize>,
}

/// Count features alive at each grid value (birth <= t < death; infinite
/// deaths count as alive forever).
pub fn betti_curve(diag: &PersistenceDiagram, grid: &[f64]) -> BettiCurve {
    debug_assert!(grid.windows(2).all(|w| w[0] < w[1]));
    BettiCurve {
        dim: diag.dim,
        grid: grid.to_vec(),
        values: grid.iter().map(|&t| diag.alive_at(t)).collect(),
    }
}

/// CSV form of a Betti curve: header `t,count`.
pub fn betti_curve_to_csv(curve: &BettiCurve) -> String {
    let mut out = String::from("t,count\n");
    for (t, v) in curve.grid.iter().zip(&curve.values) {
        out.push_str(&format!("{t},{v}\n"));
    }
    out
}

/// Fixed-length topological feature vector (length alpha).
#[derive(Clone, Debug, PartialEq)]
pub struct TopoFeatureVector {
    pub values: Vec<f64>,
}

/// Pool all diagrams, cap infinite deaths at `eps_max`, sort by persistence
/// descending (ties by dim then birth), flatten as birth,death,... and cut
/// or zero-pad to exactly `alpha` scalars.
pub fn vectorize_diagrams(
    diags: &[PersistenceDiagram],
    alpha: usize,
    eps_max: f64,
) -> TopoFeatureVector {
    let mut pairs: Vec<(usize, f64, f64)> = diags
        .iter()
        .flat_map(|d| d.pairs.iter())
        .map(|p| {
            let death = if p.is_essential() { eps_max } else { p.death };
            (p.dim, p.birth, death)
        })
        .collect();
    pairs.sort_by(|a, b| {
        let pa = a.2 - a.1;
        let pb = b.2 - b.1;
        pb.total_cmp(&pa)
            .then(a.0.cmp(&b.0))
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
    });
    let mut values = Vec::with_capacity(alpha);
    'outer: for (_, birth, death) in pairs {
        for v in [birth, death] {
            if values.len() == alpha {
                break 'outer;
            }
            values.push(v);
        }
    }
    values.resize(alpha, 0.0);
    TopoFeatureVector { values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ph::PersistencePair;

    fn diag(dim: usize, pairs: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram {
            dim,
            pairs: pairs
                .iter()
                .map(|&(birth, death)| PersistencePair { dim, birth, death })
                .collect(),
        }
    }

    #[test]
    fn grayscale_white_rgb() {
        let img = Image::new(1, 2, 3, vec![1.0; 6]).unwrap();
        let g = to_grayscale(&img).unwrap();
        for v in g.data {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grayscale_pure_red() {
        let img = Image::new(1, 1, 3, vec![1.0, 0.0, 0.0]).unwrap();
        assert!((to_grayscale(&img).unwrap().data[0] - 0.299).abs() < 1e-12);
    }

    #[test]
    fn grayscale_identity_on_gray() {
        let img = Image::new(2, 2, 1, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(to_grayscale(&img).unwrap().data, img.data);
    }

    #[test]
    fn bad_channel_count_rejected() {
        assert!(matches!(
            Image::new(1, 1, 2, vec![0.0, 0.0]),
            Err(ImageError::BadChannelCount(2))
        ));
    }

    #[test]
    fn point_cloud_single_dark_pixel() {
        let g = GrayImage { height: 2, width: 2, data: vec![1.0, 0.0, 1.0, 1.0] };
        let cloud = image_to_point_cloud(&g, 0.5, 10);
        assert_eq!(cloud.points, vec![(0.0, 1.0)]);
    }

    #[test]
    fn point_cloud_all_bright_is_empty() {
        let g = GrayImage { height: 3, width: 3, data: vec![0.9; 9] };
        assert!(image_to_point_cloud(&g, 0.5, 10).is_empty());
    }

    #[test]
    fn point_cloud_subsampling_is_deterministic() {
        let g = GrayImage { height: 10, width: 10, data: vec![0.0; 100] };
        let a = image_to_point_cloud(&g, 0.5, 10);
        let b = image_to_point_cloud(&g, 0.5, 10);
        assert_eq!(a.len(), 10);
        assert_eq!(a, b);
        // seeded at the lexicographically smallest foreground pixel
        assert!(a.points.contains(&(0.0, 0.0)));
    }

    #[test]
    fn betti_curve_half_open_aliveness() {
        let d = diag(0, &[(0.0, 5.0), (0.0, f64::INFINITY)]);
        let curve = betti_curve(&d, &[0.0, 1.0, 4.9, 5.0]);
        assert_eq!(curve.values, vec![2, 2, 2, 1]);
    }

    #[test]
    fn betti_curve_empty_diagram() {
        let curve = betti_curve(&diag(1, &[]), &[0.0, 1.0]);
        assert_eq!(curve.values, vec![0, 0]);
    }

    #[test]
    fn betti_curve_h1_example() {
        let d = diag(1, &[(1.0, 2.0f64.sqrt())]);
        assert_eq!(betti_curve(&d, &[1.2]).values, vec![1]);
    }

    #[test]
    fn vectorize_caps_sorts_and_flattens() {
        let h0 = diag(0, &[(0.0, 2.0), (0.0, f64::INFINITY)]);
        let h1 = diag(1, &[]);
        let v = vectorize_diagrams(&[h0, h1], 4, 3.0);
        assert_eq!(v.values, vec![0.0, 3.0, 0.0, 2.0]);
    }

    #[test]
    fn vectorize_alpha_zero_is_empty() {
        let h0 = diag(0, &[(0.0, 2.0)]);
        assert!(vectorize_diagrams(&[h0], 0, 3.0).values.is_empty());
    }

    #[test]
    fn vectorize_zero_pads() {
        let h1 = diag(1, &[(1.0, 2.0)]);
        let v = vectorize_diagrams(&[h1], 6, 10.0);
        assert_eq!(v.values, vec![1.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn vectorize_empty_diagrams_all_zero() {
        let v = vectorize_diagrams(&[], 4, 1.0);
        assert_eq!(v.values, vec![0.0; 4]);
    }
}
