//! Truncated Fourier series for the GFF on the unit circle.

use super::{Cutoff, FieldView};
use crate::rng::StreamKey;
use crate::{Error, Result};
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// `H_n = 1 + 1/2 + ... + 1/n`.
pub fn harmonic_number(n: usize) -> f64 {
    (1..=n).rev().map(|k| 1.0 / k as f64).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircleField {
    pub modes: usize,
    pub normalized: bool,
    /// Values at `theta_m = 2 pi m / M`.
    pub values: Vec<f64>,
    /// Exact pointwise variance: `2 H_N`, or `H_N` when normalized.
    pub variance: f64,
}

impl CircleField {
    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn theta(&self, m: usize) -> f64 {
        std::f64::consts::TAU * m as f64 / self.values.len() as f64
    }

    /// Covariance of the (un)normalized series at separation `dtheta`.
    pub fn covariance(modes: usize, normalized: bool, dtheta: f64) -> f64 {
        let c: f64 = (1..=modes).rev().map(|n| 2.0 / n as f64 * (n as f64 * dtheta).cos()).sum();
        if normalized { 0.5 * c } else { c }
    }

    /// The circle seen as `[0,1)` with cells of length `1/M` (i.e. `dθ/2π`).
    /// The normalized field is log-correlated with `gamma_c = sqrt 2`; the
    /// raw series is `sqrt 2` times larger, so its critical value is 1.
    pub fn view(&self) -> FieldView<'_> {
        let m = self.values.len();
        FieldView {
            values: &self.values,
            variance: self.variance,
            dim: 1,
            side: m,
            extent: 1.0,
            cell_volume: 1.0 / m as f64,
            cutoff: Cutoff::Modes { n: self.modes },
            gamma_c: if self.normalized { std::f64::consts::SQRT_2 } else { 1.0 },
            barrier_min: None,
        }
    }
}

/// `X(θ) = Σ_{n≤N} sqrt(2/n) (A_n cos nθ + B_n sin nθ)`, optionally over `sqrt 2`.
pub fn sample_circle_gff(modes: usize, m: usize, normalized: bool, key: StreamKey) -> Result<CircleField> {
    if modes < 1 {
        return Err(Error::param("modes", "need N >= 1"));
    }
    if m < 2 * modes {
        return Err(Error::param("m", format!("grid {m} below Nyquist 2N = {}", 2 * modes)));
    }
    let mut rng = key.rng();
    let scale = if normalized { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
    // Re Σ c_n e^{inθ} with c_n = sqrt(2/n)(A_n - i B_n).
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for n in 1..=modes {
        let a: f64 = StandardNormal.sample(&mut rng);
        let b: f64 = StandardNormal.sample(&mut rng);
        let w = scale * (2.0 / n as f64).sqrt();
        buf[n] = Complex64::new(w * a, -w * b);
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let h = harmonic_number(modes);
    Ok(CircleField {
        modes,
        normalized,
        values: buf.iter().map(|c| c.re).collect(),
        variance: if normalized { h } else { 2.0 * h },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, Tag};

    #[test]
    fn harmonic_values() {
        assert!((2.0 * harmonic_number(4) - 25.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn matches_direct_series() {
        let f = sample_circle_gff(5, 16, false, derive_stream(3, Tag::Circle, 0)).unwrap();
        let mut rng = derive_stream(3, Tag::Circle, 0).rng();
        let coef: Vec<(f64, f64)> = (0..5)
            .map(|_| {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                (a, b)
            })
            .collect();
        for m in 0..16 {
            let th = f.theta(m);
            let direct: f64 = coef
                .iter()
                .enumerate()
                .map(|(i, (a, b))| {
                    let n = (i + 1) as f64;
                    (2.0 / n).sqrt() * (a * (n * th).cos() + b * (n * th).sin())
                })
                .sum();
            assert!((direct - f.values[m]).abs() < 1e-12);
        }
    }

    #[test]
    fn covariance_partial_sum_at_pi() {
        let c = CircleField::covariance(4096, false, std::f64::consts::PI);
        assert!((c + 2.0 * 2f64.ln()).abs() < 1e-3);
    }

    #[test]
    fn rejects_sub_nyquist_grid() {
        assert!(sample_circle_gff(8, 15, true, derive_stream(0, Tag::Circle, 0)).is_err());
    }
}
