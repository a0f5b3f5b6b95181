//! Approximate chaos measures built from a field snapshot.
//!
//! Every constructor is a cell-wise transformation of a [`FieldView`]; the
//! same per-cell formulas back the allocation-free `*_total` helpers, so
//! totals computed either way agree bit for bit.

use crate::fields::{Cutoff, FieldView};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeasureKind {
    Subcritical { gamma: f64 },
    SenetaHeyde,
    Derivative,
    Barrier { beta: f64, rule: BarrierRule },
    SubcriticalRescaled { gamma: f64 },
}

/// How the barrier event is evaluated between stored levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BarrierRule {
    /// Indicator that the path stayed above `-beta` at every stored level.
    Discrete,
    /// Brownian-bridge survival probability between stored levels.
    Bridge,
}

#[inline]
pub fn subcritical_weight(x: f64, var: f64, gamma: f64) -> f64 {
    (gamma * x - 0.5 * gamma * gamma * var).exp()
}

#[inline]
pub fn derivative_weight(x: f64, var: f64, gamma_c: f64) -> f64 {
    (-x + gamma_c * var) * subcritical_weight(x, var, gamma_c)
}

#[inline]
pub fn barrier_weight(x: f64, var: f64, gamma_c: f64, beta: f64) -> f64 {
    (-x + gamma_c * var + beta) * subcritical_weight(x, var, gamma_c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureApprox {
    pub kind: MeasureKind,
    pub cutoff: Cutoff,
    pub dim: usize,
    pub side: usize,
    pub extent: f64,
    pub gamma_c: f64,
    pub cell_volume: f64,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSummary {
    pub kind: MeasureKind,
    pub cutoff: Cutoff,
    pub total: f64,
    pub positive_part: f64,
    pub negative_part: f64,
    pub cells: usize,
}

/// Axis-aligned box `[lo, hi)` in domain coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        BoxRegion { lo, hi }
    }

    pub fn cube(corner: &[f64], side: f64) -> Self {
        BoxRegion { lo: corner.to_vec(), hi: corner.iter().map(|c| c + side).collect() }
    }
}

impl MeasureApprox {
    fn from_view(view: &FieldView<'_>, kind: MeasureKind, weights: Vec<f64>) -> Self {
        MeasureApprox {
            kind,
            cutoff: view.cutoff,
            dim: view.dim,
            side: view.side,
            extent: view.extent,
            gamma_c: view.gamma_c,
            cell_volume: view.cell_volume,
            weights,
        }
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn positive_part(&self) -> f64 {
        self.weights.iter().filter(|w| **w > 0.0).sum()
    }

    pub fn negative_part(&self) -> f64 {
        -self.weights.iter().filter(|w| **w < 0.0).sum::<f64>()
    }

    pub fn summary(&self) -> MeasureSummary {
        MeasureSummary {
            kind: self.kind,
            cutoff: self.cutoff,
            total: self.total(),
            positive_part: self.positive_part(),
            negative_part: self.negative_part(),
            cells: self.weights.len(),
        }
    }

    /// Mass of a box, taking partial cells pro rata by covered volume.
    pub fn measure_of_box(&self, b: &BoxRegion) -> Result<f64> {
        if b.lo.len() != self.dim || b.hi.len() != self.dim {
            return Err(Error::param("box", "dimension mismatch"));
        }
        let h = self.extent / self.side as f64;
        let mut ranges = Vec::with_capacity(self.dim);
        for k in 0..self.dim {
            let (lo, hi) = (b.lo[k].max(0.0), b.hi[k].min(self.extent));
            if lo < -1e-12 || b.hi[k] > self.extent * (1.0 + 1e-12) || b.lo[k] < -1e-12 * self.extent {
                return Err(Error::param("box", "box leaves the domain"));
            }
            if hi <= lo {
                return Ok(0.0);
            }
            let first = ((lo / h).floor() as usize).min(self.side - 1);
            let last = ((hi / h).ceil() as usize).clamp(first + 1, self.side);
            let cover: Vec<(usize, f64)> = (first..last)
                .map(|c| {
                    let (a, z) = (c as f64 * h, (c + 1) as f64 * h);
                    (c, ((z.min(hi) - a.max(lo)) / h).clamp(0.0, 1.0))
                })
                .collect();
            ranges.push(cover);
        }
        let mut total = 0.0;
        if self.dim == 1 {
            for &(c, f) in &ranges[0] {
                total += f * self.weights[c];
            }
        } else {
            for &(a, fa) in &ranges[0] {
                for &(b, fb) in &ranges[1] {
                    total += fa * fb * self.weights[a * self.side + b];
                }
            }
        }
        Ok(total)
    }

    /// `cell,weight` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "cell,weight")?;
        for (i, v) in self.weights.iter().enumerate() {
            writeln!(w, "{i},{v:.16e}")?;
        }
        Ok(())
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::param("gamma", format!("{gamma} must be finite and nonnegative")));
    }
    Ok(())
}

/// `exp(γX - γ² Var / 2)` times cell volume.
pub fn subcritical_measure(view: &FieldView<'_>, gamma: f64) -> Result<MeasureApprox> {
    check_gamma(gamma)?;
    let w = view.values.iter().map(|&x| subcritical_weight(x, view.variance, gamma) * view.cell_volume).collect();
    Ok(MeasureApprox::from_view(view, MeasureKind::Subcritical { gamma }, w))
}

/// `(-X + γ_c Var) exp(γ_c X - γ_c² Var / 2)` times cell volume; signed.
pub fn derivative_measure(view: &FieldView<'_>) -> MeasureApprox {
    let w = view.values.iter().map(|&x| derivative_weight(x, view.variance, view.gamma_c) * view.cell_volume).collect();
    MeasureApprox::from_view(view, MeasureKind::Derivative, w)
}

/// `sqrt(t)` (or `sqrt(log 1/ε)`) times the critical subcritical weights.
pub fn seneta_heyde_measure(view: &FieldView<'_>) -> Result<MeasureApprox> {
    let factor = view.cutoff.sh_factor()?;
    let w = view
        .values
        .iter()
        .map(|&x| factor * (subcritical_weight(x, view.variance, view.gamma_c) * view.cell_volume))
        .collect();
    Ok(MeasureApprox::from_view(view, MeasureKind::SenetaHeyde, w))
}

/// Barrier measure with the discrete rule: cells whose running minimum fell
/// below `-beta` get zero weight.
pub fn barrier_measure(view: &FieldView<'_>, beta: f64) -> Result<MeasureApprox> {
    let mins = view.barrier_min.ok_or(Error::param("field", "barrier measure needs barrier minima"))?;
    let survival: Vec<f64> = mins.iter().map(|&m| if m >= -beta { 1.0 } else { 0.0 }).collect();
    barrier_from_survival(view, beta, &survival, BarrierRule::Discrete)
}

/// Barrier measure with per-cell survival weights (bridge rule).
pub fn barrier_measure_bridged(view: &FieldView<'_>, beta: f64, survival: &[f64]) -> Result<MeasureApprox> {
    barrier_from_survival(view, beta, survival, BarrierRule::Bridge)
}

fn barrier_from_survival(view: &FieldView<'_>, beta: f64, survival: &[f64], rule: BarrierRule) -> Result<MeasureApprox> {
    if !(beta >= 0.0) {
        return Err(Error::param("beta", format!("{beta} must be nonnegative")));
    }
    if survival.len() != view.values.len() {
        return Err(Error::param("survival", "length differs from the field"));
    }
    let w = view
        .values
        .iter()
        .zip(survival)
        .map(|(&x, &s)| if s > 0.0 { s * barrier_weight(x, view.variance, view.gamma_c, beta) * view.cell_volume } else { 0.0 })
        .collect();
    Ok(MeasureApprox::from_view(view, MeasureKind::Barrier { beta, rule }, w))
}

/// Subcritical weights divided by `γ_c - γ`.
pub fn subcritical_rescaled(view: &FieldView<'_>, gamma: f64) -> Result<MeasureApprox> {
    check_gamma(gamma)?;
    if gamma >= view.gamma_c {
        return Err(Error::param("gamma", format!("{gamma} must be below gamma_c = {}", view.gamma_c)));
    }
    let d = view.gamma_c - gamma;
    let w = view.values.iter().map(|&x| subcritical_weight(x, view.variance, gamma) * view.cell_volume / d).collect();
    Ok(MeasureApprox::from_view(view, MeasureKind::SubcriticalRescaled { gamma }, w))
}

/// Total subcritical mass without allocating the weights.
pub fn subcritical_total(view: &FieldView<'_>, gamma: f64) -> f64 {
    view.values.iter().map(|&x| subcritical_weight(x, view.variance, gamma) * view.cell_volume).sum()
}

/// Total derivative mass without allocating the weights.
pub fn derivative_total(view: &FieldView<'_>) -> f64 {
    view.values.iter().map(|&x| derivative_weight(x, view.variance, view.gamma_c) * view.cell_volume).sum()
}

/// Total barrier mass for given survival weights (0/1 for the discrete rule).
pub fn barrier_total(view: &FieldView<'_>, beta: f64, survival: &[f64]) -> f64 {
    view.values
        .iter()
        .zip(survival)
        .map(|(&x, &s)| if s > 0.0 { s * barrier_weight(x, view.variance, view.gamma_c, beta) * view.cell_volume } else { 0.0 })
        .sum()
}
