//! Rooted (size-biased) fields and the spine.
//!
//! Under the rooted law the marked point `x*` is uniform and the field gains
//! the deterministic mean `γ K_t(·, x*)`; the covariance is unchanged. The
//! barrier-tilted law is reached by reweighting rooted samples at `γ_c` with
//! `d_t^β(x*) / β`, where the survival part is bridge-corrected so that the
//! weight is an exact martingale.

use crate::fields::{bridge_factor, ScaleField, StarSampler};
use crate::measures::subcritical_weight;
use crate::rng::{StreamKey, Tag};
use crate::stats::{ks_weighted_two_sample, mean_and_se, KsReport};
use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Effective sample size below which the Bessel check warns.
pub const MIN_ESS: f64 = 100.0;

#[derive(Debug, Clone)]
pub struct RootedSample {
    pub root: usize,
    pub gamma: f64,
    pub field: ScaleField,
}

impl RootedSample {
    /// `X_{t_j}(x*)` for every level.
    pub fn spine(&self) -> Vec<f64> {
        (0..=self.field.levels()).map(|j| self.field.level(j)[self.root]).collect()
    }
}

/// Draws `x*` uniformly on the grid, then an untilted field shifted by
/// `γ Cov(X_{t_j}(·), X_{t_j}(x*))` on each level.
pub fn sample_rooted_field(sampler: &StarSampler, gamma: f64, key: StreamKey) -> Result<RootedSample> {
    let gc = crate::gamma_c(sampler.grid().dim);
    if !(0.0..=gc).contains(&gamma) {
        return Err(Error::param("gamma", format!("{gamma} outside [0, {gc}]")));
    }
    let grid = *sampler.grid();
    let n = grid.points();
    let root = key.with_tag(Tag::Root).rng().random_range(0..n);
    let mut field = sampler.sample(key);
    let levels = sampler.levels();
    let mut shift = vec![0.0; (levels + 1) * n];
    for j in 1..=levels {
        let row = sampler.increment_lag_cov(j);
        for i in 0..n {
            shift[j * n + i] = shift[(j - 1) * n + i] + gamma * row[grid.lag_index(i, root)];
        }
    }
    field.add_mean(|j, i| shift[j * n + i]);
    Ok(RootedSample { root, gamma, field })
}

/// `X_{t_j}(x*) - γ Var_j`: a centred Gaussian walk with the increment
/// variances of the sampler.
pub fn spine_trajectory(sample: &RootedSample) -> Vec<(f64, f64)> {
    let f = &sample.field;
    (0..=f.levels()).map(|j| (f.t(j), f.level(j)[sample.root] - sample.gamma * f.variance(j))).collect()
}

/// Bounded functionals of `(field, x*)` used to cross-check the rooted law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Functional {
    Constant,
    /// `1{X_t(x*) > γ Var_t}`.
    SpineAboveMean,
    /// `X_t` at the first grid point, clipped to `[-10, 10]`.
    ClippedOrigin,
    /// `1{-X_s(x*) + γ_c Var_s > -β}` on every level.
    BarrierSurvival { beta: f64 },
    /// `tanh X_t` at the middle grid point.
    TanhMidpoint,
}

impl Functional {
    pub const BATTERY: [Functional; 5] = [
        Functional::Constant,
        Functional::SpineAboveMean,
        Functional::ClippedOrigin,
        Functional::BarrierSurvival { beta: 1.0 },
        Functional::TanhMidpoint,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Functional::Constant => "constant",
            Functional::SpineAboveMean => "spine-above-mean",
            Functional::ClippedOrigin => "clipped-origin",
            Functional::BarrierSurvival { .. } => "barrier-survival",
            Functional::TanhMidpoint => "tanh-midpoint",
        }
    }

    /// Value with `x* = root`, for a field drawn under tilt `gamma`.
    pub fn eval(&self, field: &ScaleField, root: usize, gamma: f64) -> f64 {
        let last = field.final_values();
        match *self {
            Functional::Constant => 1.0,
            Functional::SpineAboveMean => f64::from(u8::from(last[root] > gamma * field.variance(field.levels()))),
            Functional::ClippedOrigin => last[0].clamp(-10.0, 10.0),
            Functional::BarrierSurvival { beta } => f64::from(u8::from(field.barrier_min()[root] > -beta)),
            Functional::TanhMidpoint => last[last.len() / 2].tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceCheck {
    pub functional: Functional,
    /// `E_P[∫ e^{γX - γ²Var/2} g(X, x) dx] / |A|`.
    pub p_estimate: f64,
    pub p_se: f64,
    /// `E_Q*[g(X, x*)]` from the rooted sampler.
    pub q_estimate: f64,
    pub q_se: f64,
    pub z: f64,
}

/// Compares both sides of the rooted change of measure with `A` the whole
/// grid; the two sides use disjoint streams.
pub fn importance_identity_check(sampler: &StarSampler, functional: Functional, gamma: f64, replicas: usize, seed: u64) -> Result<ImportanceCheck> {
    let grid = *sampler.grid();
    // Cell volume over |A|.
    let vol = 1.0 / grid.points() as f64;
    let p: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let f = sampler.sample(StreamKey::new(seed, Tag::Spine, r as u64));
            let var = f.variance(f.levels());
            f.final_values().iter().enumerate().map(|(i, &x)| subcritical_weight(x, var, gamma) * functional.eval(&f, i, gamma) * vol).sum()
        })
        .collect();
    let q: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let s = sample_rooted_field(sampler, gamma, StreamKey::new(seed, Tag::Root, r as u64))?;
            Ok(functional.eval(&s.field, s.root, gamma))
        })
        .collect::<Result<_>>()?;
    let (pm, ps) = mean_and_se(&p);
    let (qm, qs) = mean_and_se(&q);
    let se = (ps * ps + qs * qs).sqrt();
    let z = if se > 0.0 { (pm - qm) / se } else { 0.0 };
    Ok(ImportanceCheck { functional, p_estimate: pm, p_se: ps, q_estimate: qm, q_se: qs, z })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselReport {
    pub beta: f64,
    pub t: f64,
    pub replicas: usize,
    /// Weighted `E[R_t^2]` and its delta-method standard error.
    pub second_moment: f64,
    pub second_moment_se: f64,
    pub target: f64,
    pub z: f64,
    pub ess: f64,
    /// Mean of the raw weights; 1 up to noise.
    pub mean_weight: f64,
    pub ks: KsReport,
    pub warning: Option<String>,
}

/// Spine of the rooted law at `γ_c` (`S = -X(x*) + γ_c Var` is a standard
/// walk) reweighted by `(S_t + β) Π bridge / β`, against norms of 3-d
/// Brownian motions started at `(β, 0, 0)`.
pub fn bessel_spine_check(beta: f64, t_max: f64, dt: f64, replicas: usize, key: StreamKey) -> Result<BesselReport> {
    if !(beta > 0.0) {
        return Err(Error::param("beta", "must be positive"));
    }
    if !(dt > 0.0 && t_max >= 0.0) {
        return Err(Error::param("dt", "need dt > 0 and t_max >= 0"));
    }
    let steps = (t_max / dt).round() as usize;
    let sd = dt.sqrt();
    let tilted: Vec<(f64, f64)> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = key.with_tag(Tag::Spine).with_level(i as u64).rng();
            let (mut a, mut w) = (beta, 1.0);
            for _ in 0..steps {
                let next = a + sd * rng.sample::<f64, _>(StandardNormal);
                w *= bridge_factor(a, next, dt);
                a = next;
                if w == 0.0 {
                    break;
                }
            }
            (a, if w > 0.0 { w * a / beta } else { 0.0 })
        })
        .collect();
    let st = (steps as f64 * dt).sqrt();
    let oracle: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = key.with_tag(Tag::Oracle).with_level(i as u64).rng();
            let z: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
            ((beta + st * z[0]).powi(2) + (st * z[1]).powi(2) + (st * z[2]).powi(2)).sqrt()
        })
        .collect();
    let sw: f64 = tilted.iter().map(|p| p.1).sum();
    let sw2: f64 = tilted.iter().map(|p| p.1 * p.1).sum();
    let m2 = tilted.iter().map(|(r, w)| w * r * r).sum::<f64>() / sw;
    let se = tilted.iter().map(|(r, w)| (w * (r * r - m2)).powi(2)).sum::<f64>().sqrt() / sw;
    let ess = sw * sw / sw2;
    let target = beta * beta + 3.0 * steps as f64 * dt;
    let z = if se > 0.0 { (m2 - target) / se } else { 0.0 };
    let warning = (ess < MIN_ESS).then(|| format!("effective sample size {ess:.1} below {MIN_ESS}"));
    Ok(BesselReport {
        beta,
        t: steps as f64 * dt,
        replicas,
        second_moment: m2,
        second_moment_se: se,
        target,
        z,
        ess,
        mean_weight: sw / replicas as f64,
        ks: ks_weighted_two_sample(&tilted, &oracle),
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_kernel, Backend, KernelSpec, StarGrid};

    fn sampler(m: usize, t: f64) -> StarSampler {
        let k = make_kernel(KernelSpec::wendland(1)).unwrap();
        StarSampler::new(&k, StarGrid::unit(1, m, t, 0.25), Backend::Circulant).unwrap()
    }

    #[test]
    fn zero_tilt_is_untilted() {
        let s = sampler(64, 2.0);
        let key = StreamKey::new(3, Tag::Root, 0);
        let r = sample_rooted_field(&s, 0.0, key).unwrap();
        assert_eq!(r.field.final_values(), s.sample(key).final_values());
    }

    #[test]
    fn spine_mean_is_gamma_var() {
        let s = sampler(64, 3.0);
        let gamma = 1.0;
        let v: Vec<f64> = (0..2000)
            .map(|i| {
                let r = sample_rooted_field(&s, gamma, StreamKey::new(5, Tag::Root, i)).unwrap();
                r.spine()[s.levels()]
            })
            .collect();
        let (m, se) = mean_and_se(&v);
        let target = gamma * s.variances()[s.levels()];
        assert!((m - target).abs() < 3.0 * se, "{m} vs {target} (se {se})");
    }

    #[test]
    fn shift_stops_growing_beyond_support() {
        // Points at distance >= e^{-1} get no shift from levels past t = 1.
        let s = sampler(64, 3.0);
        let r = sample_rooted_field(&s, 1.0, StreamKey::new(9, Tag::Root, 1)).unwrap();
        let u = s.sample(StreamKey::new(9, Tag::Root, 1));
        let h = s.grid().spacing();
        let far = (0..64).find(|&i| (i as f64 - r.root as f64).abs() * h >= (-1.0f64).exp() + 1e-12).unwrap();
        let j1 = (1.0 / s.grid().dt).round() as usize;
        let base = r.field.level(j1)[far] - u.level(j1)[far];
        for j in j1..=s.levels() {
            assert!((r.field.level(j)[far] - u.level(j)[far] - base).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_functional_has_unit_mean() {
        let s = sampler(64, 2.0);
        let c = importance_identity_check(&s, Functional::Constant, 0.8, 2000, 11).unwrap();
        assert_eq!(c.q_estimate, 1.0);
        assert!((c.p_estimate - 1.0).abs() < 3.0 * c.p_se, "{c:?}");
    }

    #[test]
    fn bessel_at_time_zero_is_beta() {
        let r = bessel_spine_check(1.5, 0.0, 0.1, 100, StreamKey::new(1, Tag::Spine, 0)).unwrap();
        assert_eq!(r.second_moment, 2.25);
        assert_eq!(r.ks.distance, 0.0);
    }

    #[test]
    fn bessel_second_moment_small_run() {
        let r = bessel_spine_check(1.0, 2.0, 0.05, 20000, StreamKey::new(2, Tag::Spine, 0)).unwrap();
        assert!(r.z.abs() < 3.0, "{r:?}");
        assert!((r.mean_weight - 1.0).abs() < 0.05);
        assert!(r.warning.is_none());
    }
}
