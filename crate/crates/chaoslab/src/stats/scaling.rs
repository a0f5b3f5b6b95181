use crate::measures::{BoxRegion, MeasureApprox};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Least-squares line through log moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub abscissae: Vec<f64>,
    pub ordinates: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub target: Option<f64>,
}

impl ScalingFit {
    pub fn relative_error(&self) -> Option<f64> {
        self.target.map(|t| if t == 0.0 { self.slope.abs() } else { (self.slope - t).abs() / t.abs() })
    }
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<ScalingFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::Estimator("scaling fit needs at least 3 paired points".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Estimator("scaling fit got non-finite values".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let slope_se = (rss / (n - 2.0) / sxx).sqrt();
    Ok(ScalingFit { abscissae: x.to_vec(), ordinates: y.to_vec(), slope, intercept, slope_se, target: None })
}

/// Target scaling exponent of `E[mass(r-box)^q]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "kebab-case")]
pub enum Exponent {
    /// `2dq - dq²`, for `q < 1`.
    Critical { dim: usize, q: f64 },
    /// `(d + γ²/2) q - γ² q² / 2`, for `q < 2d/γ²`.
    Subcritical { dim: usize, gamma: f64, q: f64 },
}

impl Exponent {
    pub fn value(&self) -> f64 {
        match *self {
            Exponent::Critical { dim, q } => {
                let d = dim as f64;
                2.0 * d * q - d * q * q
            }
            Exponent::Subcritical { dim, gamma, q } => {
                let d = dim as f64;
                let g2 = gamma * gamma;
                (d + 0.5 * g2) * q - 0.5 * g2 * q * q
            }
        }
    }

    pub fn q(&self) -> f64 {
        match *self {
            Exponent::Critical { q, .. } | Exponent::Subcritical { q, .. } => q,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Exponent::Critical { q, .. } if !(q < 1.0) => Err(Error::param("q", "critical moments need q < 1")),
            Exponent::Subcritical { dim, gamma, q } if gamma > 0.0 && !(q < 2.0 * dim as f64 / (gamma * gamma)) => {
                Err(Error::param("q", "subcritical moments need q < 2d/γ²"))
            }
            _ => Ok(()),
        }
    }
}

/// Accumulates `E[mass(box)^q]` over tiling boxes of several radii.
///
/// Signed masses enter through their positive part; the count of
/// non-positive box masses is kept per radius.
#[derive(Debug, Clone)]
pub struct BoxMoments {
    q: f64,
    radii: Vec<f64>,
    sums: Vec<f64>,
    counts: Vec<usize>,
    nonpositive: Vec<usize>,
}

impl BoxMoments {
    /// Radii must lie in the resolved range `[8 e^{-t}, 0.5]`.
    pub fn new(q: f64, radii: &[f64], cutoff_t: f64) -> Result<Self> {
        let lo = 8.0 * (-cutoff_t).exp();
        if let Some(r) = radii.iter().find(|&&r| !(r >= lo * (1.0 - 1e-12) && r <= 0.5)) {
            return Err(Error::Unresolved(format!("radius {r} outside the resolved range [{lo:.3e}, 0.5] at t = {cutoff_t}")));
        }
        let k = radii.len();
        Ok(BoxMoments { q, radii: radii.to_vec(), sums: vec![0.0; k], counts: vec![0; k], nonpositive: vec![0; k] })
    }

    pub fn add(&mut self, measure: &MeasureApprox) -> Result<()> {
        for (k, &r) in self.radii.iter().enumerate() {
            let per_side = (measure.extent / r).floor() as usize;
            let boxes = per_side.pow(measure.dim as u32);
            for b in 0..boxes {
                let corner: Vec<f64> = match measure.dim {
                    1 => vec![b as f64 * r],
                    _ => vec![(b / per_side) as f64 * r, (b % per_side) as f64 * r],
                };
                let mass = measure.measure_of_box(&BoxRegion::cube(&corner, r))?;
                if mass <= 0.0 {
                    self.nonpositive[k] += 1;
                }
                self.sums[k] += mass.max(0.0).powf(self.q);
                self.counts[k] += 1;
            }
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &BoxMoments) {
        for k in 0..self.radii.len() {
            self.sums[k] += other.sums[k];
            self.counts[k] += other.counts[k];
            self.nonpositive[k] += other.nonpositive[k];
        }
    }

    pub fn moments(&self) -> Vec<f64> {
        self.sums.iter().zip(&self.counts).map(|(s, &c)| s / c as f64).collect()
    }

    pub fn nonpositive_counts(&self) -> &[usize] {
        &self.nonpositive
    }

    pub fn fit(&self, exponent: Exponent) -> Result<ScalingFit> {
        let x: Vec<f64> = self.radii.iter().map(|r| r.ln()).collect();
        let y: Vec<f64> = self.moments().iter().map(|m| m.ln()).collect();
        let mut f = fit_line(&x, &y)?;
        f.target = Some(exponent.value());
        Ok(f)
    }
}

/// Samples `replicas` measures in parallel and fits the log-log slope of
/// `E[mass(r-box)^q]` against `r`.
pub fn moment_scaling<F>(sampler: F, replicas: usize, radii: &[f64], cutoff_t: f64, exponent: Exponent) -> Result<ScalingFit>
where
    F: Fn(usize) -> Result<MeasureApprox> + Sync,
{
    exponent.validate()?;
    let q = exponent.q();
    let template = BoxMoments::new(q, radii, cutoff_t)?;
    let parts: Vec<Result<BoxMoments>> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut acc = template.clone();
            acc.add(&sampler(i)?)?;
            Ok(acc)
        })
        .collect();
    let mut total = template;
    for p in parts {
        total.merge(&p?);
    }
    total.fit(exponent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Cutoff, FieldView};
    use crate::measures::subcritical_measure;

    #[test]
    fn exponent_examples() {
        assert!((Exponent::Critical { dim: 2, q: 0.5 }.value() - 1.5).abs() < 1e-15);
        assert_eq!(Exponent::Critical { dim: 1, q: 0.0 }.value(), 0.0);
        assert!((Exponent::Subcritical { dim: 1, gamma: 1.0, q: 0.5 }.value() - 0.625).abs() < 1e-15);
    }

    #[test]
    fn lebesgue_slope_is_dq() {
        for dim in 1..=2 {
            let side: usize = if dim == 1 { 1024 } else { 64 };
            let zeros = vec![0.0; side.pow(dim as u32)];
            let radii = [1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0, 0.25];
            let fit = moment_scaling(
                |_| subcritical_measure(&FieldView::on_unit_cube(&zeros, dim, 3.0, Cutoff::Scale { t: 6.0 }), 0.0),
                2,
                &radii,
                6.0,
                Exponent::Subcritical { dim, gamma: 0.0, q: 0.7 },
            )
            .unwrap();
            assert!((fit.slope - dim as f64 * 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn unresolved_radii_rejected() {
        assert!(BoxMoments::new(0.5, &[0.001, 0.1], 4.0).is_err());
        assert!(BoxMoments::new(0.5, &[0.1, 0.7], 4.0).is_err());
    }

    #[test]
    fn line_fit_recovers_slope() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15 && f.slope_se < 1e-12);
        assert!(fit_line(&x[..2], &y[..2]).is_err());
    }
}
