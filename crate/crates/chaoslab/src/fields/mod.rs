//! Log-correlated Gaussian fields and their cutoff approximations.

mod barrier;
mod circle;
pub(crate) mod fft;
mod kernel;
mod mollify;
mod star;

pub use barrier::{bridge_factor, BarrierTracker};
pub use circle::{harmonic_number, sample_circle_gff, CircleField};
pub use kernel::{
    analytic_covariance, increment_covariance, increment_covariance_quad, make_kernel, InvariantCheck, Kernel,
    KernelFamily, KernelSpec, ValidationReport, COVARIANCE_TOL, DFT_TOLERANCE,
};
pub use mollify::{convolve_field, MollifierProfile, MollifierSpec};
pub use star::{sample_star_field, Backend, LevelView, ScaleField, StarGrid, StarSampler, AUTO_CHOLESKY_MAX_POINTS};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// How far a field approximation has been pushed towards the limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Cutoff {
    /// ⋆-scale cutoff `t` (correlations below `e^{-t}` removed).
    Scale { t: f64 },
    /// Truncated Fourier series with `n` modes (`ε = 1/n`).
    Modes { n: usize },
    /// Mollification at scale `eps`.
    Epsilon { eps: f64 },
}

impl Cutoff {
    /// Seneta–Heyde prefactor: `sqrt(t)` or `sqrt(log 1/ε)`.
    pub fn sh_factor(&self) -> Result<f64> {
        let log_inv = match *self {
            Cutoff::Scale { t } => t,
            Cutoff::Modes { n } => (n as f64).ln(),
            Cutoff::Epsilon { eps } => -eps.ln(),
        };
        if !(log_inv > 0.0) {
            return Err(Error::param("cutoff", "Seneta–Heyde normalization needs a positive cutoff"));
        }
        Ok(log_inv.sqrt())
    }

    pub fn value(&self) -> f64 {
        match *self {
            Cutoff::Scale { t } => t,
            Cutoff::Modes { n } => n as f64,
            Cutoff::Epsilon { eps } => eps,
        }
    }
}

/// A single-cutoff snapshot of a field on a square grid, as consumed by the
/// measure constructors.
#[derive(Debug, Clone, Copy)]
pub struct FieldView<'a> {
    pub values: &'a [f64],
    /// Realized pointwise variance (the same at every grid point).
    pub variance: f64,
    pub dim: usize,
    pub side: usize,
    /// Side length of the domain `[0, extent]^d`.
    pub extent: f64,
    pub cell_volume: f64,
    pub cutoff: Cutoff,
    pub gamma_c: f64,
    /// Running minimum of `-X_s + gamma_c Var_s`, when trajectories exist.
    pub barrier_min: Option<&'a [f64]>,
}

impl<'a> FieldView<'a> {
    /// A view of arbitrary values on `[0,1]^d` with the given variance.
    pub fn on_unit_cube(values: &'a [f64], dim: usize, variance: f64, cutoff: Cutoff) -> Self {
        let side = side_of(values.len(), dim);
        FieldView {
            values,
            variance,
            dim,
            side,
            extent: 1.0,
            cell_volume: (side as f64).powi(-(dim as i32)),
            cutoff,
            gamma_c: crate::gamma_c(dim),
            barrier_min: None,
        }
    }

    pub fn domain_volume(&self) -> f64 {
        self.extent.powi(self.dim as i32)
    }
}

pub(crate) fn side_of(len: usize, dim: usize) -> usize {
    match dim {
        1 => len,
        2 => {
            let s = (len as f64).sqrt().round() as usize;
            assert_eq!(s * s, len, "2d field must be square");
            s
        }
        _ => panic!("unsupported dimension {dim}"),
    }
}
