//! Equal-width and equal-frequency discretization baselines.
//!
//! Both methods cut the measured field values into `k` bins described by
//! ascending boundary values. Bins are half-open: value `v` falls in bin `j`
//! when `b_{j-1} <= v < b_j`, with the last bin closed above. The baselines
//! exist for side-by-side comparison with the trained cluster levels; they
//! carry no notion of cluster structure.

use thiserror::Error;

/// A discretization: ascending cut points plus the per-instance bin label.
#[derive(Debug, Clone, PartialEq)]
pub struct BinAssignment {
    /// Strictly ascending cut points; at most `k - 1` of them.
    pub boundaries: Vec<f64>,
    /// Bin index per input value, in input order.
    pub labels: Vec<usize>,
}

impl BinAssignment {
    /// Number of bins implied by the boundaries.
    pub fn bin_count(&self) -> usize {
        self.boundaries.len() + 1
    }

    /// Per-bin member counts, indexed by label.
    pub fn bin_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.bin_count()];
        for &label in &self.labels {
            sizes[label] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BinningError {
    #[error("cannot bin an empty value list")]
    EmptyInput,
    #[error("bin count must be at least 1")]
    NonPositiveK,
    #[error("values contain a non-finite entry")]
    NonFiniteValue,
}

fn check_input(values: &[f64], k: usize) -> Result<(), BinningError> {
    if values.is_empty() {
        return Err(BinningError::EmptyInput);
    }
    if k < 1 {
        return Err(BinningError::NonPositiveK);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(BinningError::NonFiniteValue);
    }
    Ok(())
}

/// Label each value against ascending boundaries: the label is the number of
/// boundaries at or below the value.
fn label_values(values: &[f64], boundaries: &[f64]) -> Vec<usize> {
    values
        .iter()
        .map(|&v| boundaries.partition_point(|&b| b <= v))
        .collect()
}

/// Cut the observed range `[min, max]` into `k` equal-width bins:
/// boundaries at `min + j * (max - min) / k` for `j = 1..k-1`. When all
/// values coincide the range is empty and everything lands in bin 0.
pub fn equal_width_bins(values: &[f64], k: usize) -> Result<BinAssignment, BinningError> {
    check_input(values, k)?;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let boundaries: Vec<f64> = if min == max {
        Vec::new()
    } else {
        (1..k)
            .map(|j| min + j as f64 * (max - min) / k as f64)
            .collect()
    };
    let labels = label_values(values, &boundaries);
    Ok(BinAssignment { boundaries, labels })
}

/// Cut at the `j/k` empirical quantiles (nearest rank): boundary `j` is the
/// sorted value at index `floor(len * j / k)`. Tied quantiles are
/// deduplicated, shrinking the effective bin count, so boundaries stay
/// strictly ascending.
pub fn equal_frequency_bins(values: &[f64], k: usize) -> Result<BinAssignment, BinningError> {
    check_input(values, k)?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut boundaries: Vec<f64> = Vec::with_capacity(k.saturating_sub(1));
    for j in 1..k {
        let cut = sorted[sorted.len() * j / k];
        if boundaries.last().is_none_or(|&last| cut > last) {
            boundaries.push(cut);
        }
    }
    // a cut equal to the minimum would leave bin 0 empty and every label
    // shifted; it separates nothing, so drop it
    if boundaries.first() == Some(&sorted[0]) {
        boundaries.remove(0);
    }
    let labels = label_values(values, &boundaries);
    Ok(BinAssignment { boundaries, labels })
}
