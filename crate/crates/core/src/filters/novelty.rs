use super::Codebook;
use crate::error::{contract, Result};
use crate::kernel::squared_distance;

/// Novelty-criterion thresholds. With zero thresholds the gate only rejects
/// exact repeats and exactly-zero errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcParams {
    pub dist_threshold: f64,
    pub err_threshold: f64,
    pub enabled: bool,
}

impl NcParams {
    pub fn new(dist_threshold: f64, err_threshold: f64) -> Result<Self> {
        if !(dist_threshold >= 0.0 && err_threshold >= 0.0) {
            return Err(contract("novelty thresholds must be nonnegative"));
        }
        if !(dist_threshold.is_finite() && err_threshold.is_finite()) {
            return Err(contract("novelty thresholds must be finite"));
        }
        Ok(Self { dist_threshold, err_threshold, enabled: true })
    }

    pub fn disabled() -> Self {
        Self { dist_threshold: 0.0, err_threshold: 0.0, enabled: false }
    }
}

/// Admits `u` as a new center iff its distance to every stored center exceeds
/// `dist_threshold` and `|error|` exceeds `err_threshold`. Both comparisons
/// are strict. An empty codebook admits everything.
pub fn nc_gate(codebook: &Codebook, u: &[f64], error: f64, nc: &NcParams) -> bool {
    if !nc.enabled || codebook.is_empty() {
        return true;
    }
    if error.abs() <= nc.err_threshold {
        return false;
    }
    codebook.centers().all(|c| squared_distance(c, u).sqrt() > nc.dist_threshold)
}
