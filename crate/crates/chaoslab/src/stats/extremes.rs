use super::estimate::quantile;
use crate::fields::StarSampler;
use crate::measures::derivative_total;
use crate::rng::{StreamKey, Tag};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `m_t = sqrt(2d) t - 3/(2 sqrt(2d)) log t`.
pub fn recentring(dim: usize, t: f64) -> f64 {
    let g = crate::gamma_c(dim);
    g * t - 1.5 / g * t.ln()
}

/// Relative IQR deviation tolerated across the ladder.
pub const IQR_BAND: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    pub t: f64,
    pub m_t: f64,
    pub samples: usize,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub iqr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GumbelShiftFit {
    pub t: f64,
    pub c_star: f64,
    /// KS distance between the recentred maxima and the fitted law.
    pub distance: f64,
    pub used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremesReport {
    pub dim: usize,
    pub ladder: Vec<LadderPoint>,
    pub mean_iqr: f64,
    pub max_relative_deviation: f64,
    pub stable: bool,
    pub fit: Option<GumbelShiftFit>,
}

/// Model CDF `P(max - m_t <= x) = mean_i exp(-C e^{-sqrt(2d) x} W_i)`.
fn model_cdf(x: f64, c: f64, g: f64, w: &[f64]) -> f64 {
    let s = c * (-g * x).exp();
    w.iter().map(|wi| (-s * wi).exp()).sum::<f64>() / w.len() as f64
}

fn fit_distance(sorted: &[f64], c: f64, g: f64, w: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = model_cdf(x, c, g, w);
            ((i + 1) as f64 / n - f).abs().max((f - i as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Fits `C*` freely by minimizing the KS distance over `log C*`.
pub fn fit_gumbel_shift(dim: usize, t: f64, recentred: &[f64], derivative: &[f64]) -> Option<GumbelShiftFit> {
    let w: Vec<f64> = derivative.iter().copied().filter(|&v| v > 0.0).collect();
    if w.is_empty() || recentred.is_empty() {
        return None;
    }
    let g = crate::gamma_c(dim);
    let mut sorted = recentred.to_vec();
    sorted.sort_by(f64::total_cmp);
    let obj = |lc: f64| fit_distance(&sorted, lc.exp(), g, &w);
    let (mut best, mut best_lc) = (f64::INFINITY, 0.0);
    for k in 0..=200 {
        let lc = -10.0 + 0.1 * k as f64;
        let v = obj(lc);
        if v < best {
            best = v;
            best_lc = lc;
        }
    }
    // Golden-section refinement around the grid minimum.
    let (mut a, mut b) = (best_lc - 0.1, best_lc + 0.1);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..40 {
        let (c1, c2) = (b - r * (b - a), a + r * (b - a));
        if obj(c1) < obj(c2) { b = c2 } else { a = c1 }
    }
    let lc = 0.5 * (a + b);
    let d = obj(lc);
    let (lc, d) = if d < best { (lc, d) } else { (best_lc, best) };
    Some(GumbelShiftFit { t, c_star: lc.exp(), distance: d, used: w.len() })
}

/// Summarizes recentred maxima per ladder value; `derivative` are the
/// paired derivative masses at the last ladder value.
pub fn extremes_from_samples(dim: usize, ladder: &[f64], maxima: &[Vec<f64>], derivative: &[f64]) -> Result<ExtremesReport> {
    if ladder.len() != maxima.len() || ladder.is_empty() {
        return Err(Error::Estimator("one sample vector per ladder value required".into()));
    }
    let points: Vec<LadderPoint> = ladder
        .iter()
        .zip(maxima)
        .map(|(&t, mx)| {
            let m_t = recentring(dim, t);
            let rec: Vec<f64> = mx.iter().map(|x| x - m_t).collect();
            let (q25, q50, q75) = (quantile(&rec, 0.25), quantile(&rec, 0.5), quantile(&rec, 0.75));
            LadderPoint { t, m_t, samples: rec.len(), q25, median: q50, q75, iqr: q75 - q25 }
        })
        .collect();
    let mean_iqr = points.iter().map(|p| p.iqr).sum::<f64>() / points.len() as f64;
    let max_dev = points.iter().map(|p| (p.iqr - mean_iqr).abs() / mean_iqr).fold(0.0, f64::max);
    let last = ladder.len() - 1;
    let rec_last: Vec<f64> = maxima[last].iter().map(|x| x - points[last].m_t).collect();
    let fit = fit_gumbel_shift(dim, ladder[last], &rec_last, derivative);
    Ok(ExtremesReport { dim, ladder: points, mean_iqr, max_relative_deviation: max_dev, stable: max_dev <= IQR_BAND, fit })
}

/// Samples maxima at each ladder value (which must be levels of the
/// sampler) from shared trajectories.
pub fn extremes(sampler: &StarSampler, ladder: &[f64], replicas: usize, seed: u64) -> Result<ExtremesReport> {
    let grid = sampler.grid();
    if grid.spacing() > 2.0 * (-grid.t_max).exp() {
        return Err(Error::Unresolved(format!("grid spacing {:.3e} too coarse for the maximum at t = {}", grid.spacing(), grid.t_max)));
    }
    let levels: Vec<usize> = ladder
        .iter()
        .map(|&t| {
            let j = (t / grid.dt).round() as usize;
            if (j as f64 * grid.dt - t).abs() > 1e-9 || j > sampler.levels() {
                Err(Error::param("ladder", format!("{t} is not a level of the sampler")))
            } else {
                Ok(j)
            }
        })
        .collect::<Result<_>>()?;
    let last = *levels.iter().max().expect("non-empty ladder");
    let rows: Vec<(Vec<f64>, f64)> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut maxes = vec![f64::NAN; levels.len()];
            let mut w = 0.0;
            sampler.sample_with(StreamKey::new(seed, Tag::StarField, i as u64), |lv| {
                for (k, &j) in levels.iter().enumerate() {
                    if lv.level == j {
                        maxes[k] = lv.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    }
                }
                if lv.level == last {
                    let view = crate::fields::FieldView::on_unit_cube(lv.values, grid.dim, lv.variance, crate::fields::Cutoff::Scale { t: lv.t });
                    w = derivative_total(&view);
                }
            });
            (maxes, w)
        })
        .collect();
    let maxima: Vec<Vec<f64>> = (0..levels.len()).map(|k| rows.iter().map(|r| r.0[k]).collect()).collect();
    let w: Vec<f64> = rows.iter().map(|r| r.1).collect();
    extremes_from_samples(grid.dim, ladder, &maxima, &w)
}
