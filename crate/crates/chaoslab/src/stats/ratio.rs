use super::estimate::EstimateResult;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// `sqrt(2/π)`.
pub const SH_TARGET: f64 = 0.797_884_560_802_865_4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub median: EstimateResult,
    pub mean: EstimateResult,
    pub excluded_nonpositive: usize,
    pub target: f64,
}

impl RatioReport {
    pub fn median_relative_error(&self) -> f64 {
        (self.median.estimate - self.target).abs() / self.target
    }
}

/// Median and mean of `numerator / denominator` over pairs with a positive
/// denominator.
pub fn ratio_summary(pairs: &[(f64, f64)], target: f64) -> Result<RatioReport> {
    let ratios: Vec<f64> = pairs.iter().filter(|p| p.1 > 0.0).map(|(a, b)| a / b).collect();
    if ratios.is_empty() {
        return Err(Error::Estimator("every denominator mass is non-positive".into()));
    }
    Ok(RatioReport {
        median: EstimateResult::from_median(&ratios),
        mean: EstimateResult::from_mean(&ratios),
        excluded_nonpositive: pairs.len() - ratios.len(),
        target,
    })
}

/// Ratio of Seneta–Heyde to derivative masses from the same replicas.
pub fn sh_ratio(pairs: &[(f64, f64)]) -> Result<RatioReport> {
    ratio_summary(pairs, SH_TARGET)
}
