//! Quantile histogram binning.
//!
//! Bin boundaries are placed at empirical quantiles of each feature's
//! distinct values and frozen at train time; prediction re-uses the stored
//! boundaries. The bin of a value v is the number of boundaries <= v, so the
//! mapping is monotone and extremes clamp into the first/last bin.

use super::{FeatureMatrix, GbdtError};

/// Binned view of a feature matrix: per-feature boundaries plus per-sample
/// bin indices, stored feature-major.
#[derive(Clone, Debug)]
pub struct BinnedDataset {
    pub boundaries: Vec<Vec<f64>>,
    /// bins[feature][row]
    pub bins: Vec<Vec<u16>>,
    pub n_rows: usize,
}

impl BinnedDataset {
    pub fn n_features(&self) -> usize {
        self.boundaries.len()
    }

    /// Number of bins for a feature (internal boundaries + 1).
    pub fn n_bins(&self, feature: usize) -> usize {
        self.boundaries[feature].len() + 1
    }
}

/// Bin index of a raw value given increasing internal boundaries.
pub fn bin_of(boundaries: &[f64], v: f64) -> u16 {
    boundaries.partition_point(|&b| b <= v) as u16
}

/// Boundaries at empirical quantiles over the distinct values of one feature.
pub fn quantile_boundaries(values: &[f64], max_bins: usize) -> Vec<f64> {
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() <= 1 {
        return Vec::new();
    }
    if distinct.len() <= max_bins {
        // one bin per distinct value, boundaries at midpoints
        return distinct.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
    }
    let n = distinct.len();
    let mut out = Vec::with_capacity(max_bins - 1);
    for b in 1..max_bins {
        let idx = b * n / max_bins;
        out.push((distinct[idx - 1] + distinct[idx]) / 2.0);
    }
    out.dedup();
    out
}

/// Bin every feature of `x` to at most `max_bins` quantile bins.
pub fn bin_features(x: &FeatureMatrix, max_bins: usize) -> Result<BinnedDataset, GbdtError> {
    assert!(max_bins >= 2 && max_bins <= u16::MAX as usize + 1);
    if x.values.iter().any(|v| !v.is_finite()) {
        return Err(GbdtError::NonFiniteFeature);
    }
    let mut boundaries = Vec::with_capacity(x.cols);
    let mut bins = Vec::with_capacity(x.cols);
    let mut col_buf = vec![0.0; x.rows];
    for f in 0..x.cols {
        for r in 0..x.rows {
            col_buf[r] = x.get(r, f);
        }
        let b = quantile_boundaries(&col_buf, max_bins);
        let idx: Vec<u16> = col_buf.iter().map(|&v| bin_of(&b, v)).collect();
        boundaries.push(b);
        bins.push(idx);
    }
    Ok(BinnedDataset { boundaries, bins, n_rows: x.rows })
}
