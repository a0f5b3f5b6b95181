use super::ks::{ks_two_sample, KsReport};
use crate::fields::{Backend, Kernel, StarGrid, StarSampler};
use crate::measures::subcritical_weight;
use crate::rng::{StreamKey, Tag};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarEquationReport {
    pub gamma: f64,
    pub t: f64,
    pub big_t: f64,
    pub ks: KsReport,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

/// Compares the law of `μ_T^γ([0,1]^d)` with the composite
/// `∫ e^{γX_t - γ²Var_t/2} e^{-dt} dμ'` where `μ'` is an independent
/// cutoff-`(T-t)` measure on `[0, e^t]^d` pulled back by `x -> e^t x`.
///
/// The inner cutoff `T - t` makes both sides resolve the same scales, so
/// they agree in law at finite `T` as well as in the limit.
#[allow(clippy::too_many_arguments)]
pub fn star_equation_check(kernel: &Kernel, gamma: f64, t: f64, big_t: f64, m: usize, dt: f64, replicas: usize, seed: u64) -> Result<StarEquationReport> {
    let dim = kernel.dim();
    if !(gamma >= 0.0 && gamma < crate::gamma_c(dim)) {
        return Err(Error::param("gamma", "need 0 <= gamma < gamma_c"));
    }
    if !(t >= 0.0 && big_t > t) {
        return Err(Error::param("t", "need 0 <= t < T"));
    }
    let lhs_grid = StarGrid::unit(dim, m, big_t, dt);
    let outer_grid = StarGrid::unit(dim, m, t, dt);
    let inner_grid = StarGrid { dim, m, extent: t.exp(), t_max: big_t - t, dt };
    if inner_grid.spacing() > (-(big_t - t)).exp() || lhs_grid.spacing() > (-big_t).exp() {
        return Err(Error::Unresolved(format!("grid of {m} cells does not resolve cutoff {big_t} (rescaled window e^{t})")));
    }
    let lhs = StarSampler::new(kernel, lhs_grid, Backend::Circulant)?;
    let outer = StarSampler::new(kernel, outer_grid, Backend::Circulant)?;
    let inner = StarSampler::new(kernel, inner_grid, Backend::Circulant)?;
    let scale = (-(dim as f64) * t).exp();
    let pairs: Vec<(f64, f64)> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let key = StreamKey::new(seed, Tag::StarEquation, i as u64);
            let a = lhs.sample(key);
            let va = a.view();
            let left: f64 = va.values.iter().map(|&x| subcritical_weight(x, va.variance, gamma) * va.cell_volume).sum();
            let o = outer.sample(key.with_tag(Tag::Shift));
            let inn = inner.sample(key.with_tag(Tag::Aux));
            let (vo, vi) = (o.view(), inn.view());
            let right: f64 = vo
                .values
                .iter()
                .zip(vi.values)
                .map(|(&x, &y)| subcritical_weight(x, vo.variance, gamma) * scale * subcritical_weight(y, vi.variance, gamma) * vi.cell_volume)
                .sum();
            (left, right)
        })
        .collect();
    let (l, r): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(StarEquationReport { gamma, t, big_t, ks: ks_two_sample(&l, &r), lhs: l, rhs: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_kernel, KernelSpec};

    #[test]
    fn gamma_zero_is_deterministic() {
        let k = make_kernel(KernelSpec::wendland(1)).unwrap();
        let r = star_equation_check(&k, 0.0, 1.0, 3.0, 64, 0.1, 20, 1).unwrap();
        assert!(r.ks.distance < 1e-12 || r.lhs.iter().zip(&r.rhs).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!(r.lhs.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn unresolved_window_is_rejected() {
        let k = make_kernel(KernelSpec::wendland(1)).unwrap();
        assert!(star_equation_check(&k, 0.5, 1.0, 6.0, 64, 0.1, 10, 1).is_err());
    }
}
