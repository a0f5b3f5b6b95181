use super::estimate::median;
use super::ks::ks_one_sample;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Median of `sqrt 2 * mass` under the law `exp(-1/y)`: `1 / ln 2`.
pub const GUMBEL_MEDIAN_TARGET: f64 = std::f64::consts::LOG2_E;

pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GumbelReport {
    pub ks_distance: f64,
    pub p_value: f64,
    pub used: usize,
    pub excluded_nonpositive: usize,
    pub median_scaled_mass: f64,
    pub median_target: f64,
    pub median_relative_error: f64,
}

/// Compares `ln(sqrt 2 * mass)` with the standard Gumbel law.
pub fn gumbel_test(masses: &[f64]) -> Result<GumbelReport> {
    let scaled: Vec<f64> = masses.iter().filter(|&&m| m > 0.0).map(|m| std::f64::consts::SQRT_2 * m).collect();
    if scaled.is_empty() {
        return Err(Error::Estimator("no positive masses".into()));
    }
    let logs: Vec<f64> = scaled.iter().map(|y| y.ln()).collect();
    let ks = ks_one_sample(&logs, gumbel_cdf);
    let med = median(&scaled);
    Ok(GumbelReport {
        ks_distance: ks.distance,
        p_value: ks.p_value,
        used: scaled.len(),
        excluded_nonpositive: masses.len() - scaled.len(),
        median_scaled_mass: med,
        median_target: GUMBEL_MEDIAN_TARGET,
        median_relative_error: (med - GUMBEL_MEDIAN_TARGET).abs() / GUMBEL_MEDIAN_TARGET,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((gumbel_cdf(0.0) - (-1.0f64).exp()).abs() < 1e-16);
        assert!(((-1.0 / GUMBEL_MEDIAN_TARGET).exp() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_gumbel_quantiles_pass() {
        // mass = e^G / sqrt 2 with G at the Gumbel quantiles.
        let n = 20_000;
        let masses: Vec<f64> = (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) / n as f64;
                (-(-u.ln()).ln()).exp() / std::f64::consts::SQRT_2
            })
            .chain([-1.0, 0.0])
            .collect();
        let r = gumbel_test(&masses).unwrap();
        assert!(r.ks_distance < 1e-4);
        assert_eq!(r.excluded_nonpositive, 2);
        assert!(r.median_relative_error < 1e-3);
        assert!(gumbel_test(&[-1.0]).is_err());
    }
}
