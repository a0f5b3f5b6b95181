use super::estimate::EstimateResult;
use crate::fields::{FieldView, StarSampler};
use crate::measures::subcritical_weight;
use crate::rng::{StreamKey, StreamRng, Tag};
use crate::{Error, Result};
use rand::Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThickMode {
    /// Point drawn from the normalized subcritical measure.
    MeasureSampled,
    /// A fixed grid point (contrast case).
    Fixed(usize),
}

/// `X(y) / Var` at a point `y` chosen according to `mode`.
pub fn thick_point_sample(view: &FieldView<'_>, gamma: f64, mode: ThickMode, rng: &mut StreamRng) -> Result<f64> {
    if !(gamma >= 0.0 && gamma < view.gamma_c) {
        return Err(Error::param("gamma", "need 0 <= gamma < gamma_c"));
    }
    if !(view.variance > 0.0) {
        return Err(Error::param("field", "cutoff must be positive"));
    }
    let y = match mode {
        ThickMode::Fixed(i) => i,
        ThickMode::MeasureSampled => {
            let w: Vec<f64> = view.values.iter().map(|&x| subcritical_weight(x, view.variance, gamma)).collect();
            let total: f64 = w.iter().sum();
            if !(total > 0.0) {
                return Err(Error::Estimator("zero total mass".into()));
            }
            let mut u = rng.random::<f64>() * total;
            let mut pick = w.len() - 1;
            for (i, wi) in w.iter().enumerate() {
                if u < *wi {
                    pick = i;
                    break;
                }
                u -= wi;
            }
            pick
        }
    };
    Ok(view.values[y] / view.variance)
}

/// Mean of `X_t(y)/t` over replicas; the target is `γ` for measure-sampled
/// points and 0 for a fixed point.
pub fn thick_point_statistic(sampler: &StarSampler, gamma: f64, mode: ThickMode, replicas: usize, seed: u64) -> Result<EstimateResult> {
    let vals: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let key = StreamKey::new(seed, Tag::Thick, i as u64);
            let f = sampler.sample(key);
            thick_point_sample(&f.view(), gamma, mode, &mut key.with_tag(Tag::Aux).rng())
        })
        .collect::<Result<_>>()?;
    Ok(EstimateResult::from_mean(&vals).with_meta("gamma", gamma).with_meta("t", sampler.grid().t_max))
}
