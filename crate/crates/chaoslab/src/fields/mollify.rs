//! Mollification `X_ε = ψ_ε * X` on a periodic grid.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MollifierProfile {
    /// `exp(-1 / (1 - |x|^2))` on the unit ball.
    Bump,
    /// `(1 - |x|^2)^3` on the unit ball.
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub profile: MollifierProfile,
    pub eps: f64,
}

impl MollifierProfile {
    fn eval(self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        let u = 1.0 - r * r;
        match self {
            MollifierProfile::Bump => (-1.0 / u).exp(),
            MollifierProfile::Polynomial => u * u * u,
        }
    }
}

impl MollifierSpec {
    /// Normalized stencil `(offsets, weights)` on a grid of spacing `h`.
    pub fn stencil(&self, dim: usize, h: f64) -> Result<(Vec<Vec<isize>>, Vec<f64>)> {
        if !(self.eps >= 2.0 * h) {
            return Err(Error::Unresolved(format!("mollifier scale {} below two grid spacings ({})", self.eps, 2.0 * h)));
        }
        let reach = (self.eps / h).ceil() as isize;
        let mut offsets = Vec::new();
        let mut weights = Vec::new();
        let mut push = |off: Vec<isize>| {
            let r = off.iter().map(|&o| (o as f64 * h).powi(2)).sum::<f64>().sqrt() / self.eps;
            let w = self.profile.eval(r);
            if w > 0.0 {
                offsets.push(off);
                weights.push(w);
            }
        };
        for a in -reach..=reach {
            if dim == 1 {
                push(vec![a]);
            } else {
                for b in -reach..=reach {
                    push(vec![a, b]);
                }
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok((offsets, weights))
    }
}

/// Periodic discrete convolution of a field on `[0,1]^d` (row-major, `d ≤ 2`).
pub fn convolve_field(values: &[f64], dim: usize, spec: &MollifierSpec) -> Result<Vec<f64>> {
    let side = super::side_of(values.len(), dim);
    let h = 1.0 / side as f64;
    let (offsets, weights) = spec.stencil(dim, h)?;
    let s = side as isize;
    let wrap = |i: isize| i.rem_euclid(s) as usize;
    let mut out = vec![0.0; values.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        if dim == 1 {
            for (off, w) in offsets.iter().zip(&weights) {
                acc += w * values[wrap(idx as isize + off[0])];
            }
        } else {
            let (a, b) = ((idx / side) as isize, (idx % side) as isize);
            for (off, w) in offsets.iter().zip(&weights) {
                acc += w * values[wrap(a + off[0]) * side + wrap(b + off[1])];
            }
        }
        *o = acc;
    }
    Ok(out)
}
