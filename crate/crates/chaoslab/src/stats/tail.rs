use super::estimate::median;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

pub const TAIL_MIN_SAMPLES: usize = 10_000;
pub const TAIL_MIN_EXCEEDANCES: usize = 30;
/// Relative band around the target for a point to count towards a plateau.
pub const TAIL_BAND: f64 = 0.2;

/// `|A| / sqrt(π d)`.
pub fn tail_target(domain_volume: f64, dim: usize) -> f64 {
    domain_volume / (std::f64::consts::PI * dim as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub threshold: f64,
    /// `threshold * P(mass > threshold)`.
    pub scaled: f64,
    pub std_error: f64,
    pub exceedances: usize,
    /// Fewer than the minimum number of exceedances.
    pub flagged: bool,
    /// Threshold below the sample median.
    pub pre_asymptotic: bool,
    pub within_band: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub points: Vec<TailPoint>,
    pub target: f64,
    pub band: f64,
    pub samples: usize,
    pub median: f64,
    /// Longest run of consecutive usable thresholds inside the band.
    pub plateau_run: usize,
    pub plateau_value: Option<f64>,
}

pub fn tail_estimate(samples: &[f64], thresholds: &[f64], domain_volume: f64, dim: usize) -> Result<TailReport> {
    if samples.len() < TAIL_MIN_SAMPLES {
        return Err(Error::Estimator(format!("tail estimate needs at least {TAIL_MIN_SAMPLES} samples, got {}", samples.len())));
    }
    let target = tail_target(domain_volume, dim);
    let n = samples.len() as f64;
    let med = median(samples);
    let points: Vec<TailPoint> = thresholds
        .iter()
        .map(|&t| {
            let k = samples.iter().filter(|&&m| m > t).count();
            let p = k as f64 / n;
            let scaled = t * p;
            let flagged = k < TAIL_MIN_EXCEEDANCES;
            let pre = t < med;
            TailPoint {
                threshold: t,
                scaled,
                std_error: t * (p * (1.0 - p) / n).sqrt(),
                exceedances: k,
                flagged,
                pre_asymptotic: pre,
                within_band: !flagged && !pre && (scaled - target).abs() <= TAIL_BAND * target,
            }
        })
        .collect();
    let (mut best, mut best_end, mut run) = (0usize, 0usize, 0usize);
    for (i, p) in points.iter().enumerate() {
        run = if p.within_band { run + 1 } else { 0 };
        if run > best {
            best = run;
            best_end = i + 1;
        }
    }
    let plateau_value = (best > 0).then(|| points[best_end - best..best_end].iter().map(|p| p.scaled).sum::<f64>() / best as f64);
    Ok(TailReport { points, target, band: TAIL_BAND, samples: samples.len(), median: med, plateau_run: best, plateau_value })
}
