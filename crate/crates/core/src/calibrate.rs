//! Standardization of raw index values against a pool of clusterings.
//!
//! Values are first oriented so that larger is better (smaller-better
//! indexes are negated), then centered and scaled by the mean and sample
//! standard deviation of the pooled random and method clusterings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexes::Orientation;

/// Weight of the calibrated density-decrease index in the density-mode aggregate.
pub const DENSDEC_WEIGHT: f64 = 0.75;
/// Weight of the calibrated high-density-gap index in the density-mode aggregate.
pub const HIGHDGAP_WEIGHT: f64 = 0.25;

#[inline]
pub fn orient(raw: f64, orientation: Orientation) -> f64 {
    match orientation {
        Orientation::LargerBetter => raw,
        Orientation::SmallerBetter => -raw,
    }
}

/// Mean and standard deviation of the oriented pool.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolStats {
    pub mean: f64,
    pub sd: f64,
    pub size: usize,
    pub orientation: Orientation,
}

impl PoolStats {
    /// Pool statistics of raw values (denominator `size − 1` for the variance).
    pub fn from_raw(raw: &[f64], orientation: Orientation) -> Result<Self> {
        let size = raw.len();
        if size < 2 {
            return Err(Error::Config(format!(
                "calibration pool needs at least 2 values, got {size}"
            )));
        }
        let oriented: Vec<f64> = raw.iter().map(|&v| orient(v, orientation)).collect();
        let mean = oriented.iter().sum::<f64>() / size as f64;
        let var = oriented.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (size - 1) as f64;
        let sd = var.sqrt();
        // spread at rounding level of the values counts as no spread
        if !(sd > 1e-12 * mean.abs()) {
            return Err(Error::ZeroPooledSd);
        }
        Ok(PoolStats {
            mean,
            sd,
            size,
            orientation,
        })
    }

    pub fn standardize(&self, raw: f64) -> f64 {
        (orient(raw, self.orientation) - self.mean) / self.sd
    }

    pub fn calibrated(&self, raw: f64) -> CalibratedIndex {
        CalibratedIndex {
            raw,
            calibrated: self.standardize(raw),
            pool_mean: self.mean,
            pool_sd: self.sd,
            orientation: self.orientation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibratedIndex {
    pub raw: f64,
    pub calibrated: f64,
    pub pool_mean: f64,
    pub pool_sd: f64,
    pub orientation: Orientation,
}

/// Calibrates `method_values` against the pool formed with `ensemble_values`.
pub fn calibrate(
    method_values: &[f64],
    ensemble_values: &[f64],
    orientation: Orientation,
) -> Result<Vec<CalibratedIndex>> {
    let pool: Vec<f64> = ensemble_values.iter().chain(method_values).copied().collect();
    let stats = PoolStats::from_raw(&pool, orientation)?;
    Ok(method_values.iter().map(|&v| stats.calibrated(v)).collect())
}

/// Density-mode aggregate of the two calibrated density indexes.
pub fn dmode_aggregate(densdec_star: f64, highdgap_star: f64) -> f64 {
    DENSDEC_WEIGHT * densdec_star + HIGHDGAP_WEIGHT * highdgap_star
}
