use super::estimate::{normal_cdf, EstimateResult};
use crate::rng::StreamKey;
use crate::{Error, Result};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Walk length used for meander sampling.
pub const MEANDER_STEPS: usize = 1 << 10;
const MIN_ACCEPTANCE: f64 = 1e-4;

/// `sqrt(2π) C e^{C²/2}`, the large-`C` behaviour of `E[e^{C R_1}]`.
pub fn meander_asymptote(c: f64) -> f64 {
    (2.0 * std::f64::consts::PI).sqrt() * c * (0.5 * c * c).exp()
}

/// `E[e^{C R_1}]` for the Rayleigh-distributed meander endpoint.
pub fn meander_exact(c: f64) -> f64 {
    1.0 + meander_asymptote(c) * normal_cdf(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanderReport {
    pub c: f64,
    pub estimate: EstimateResult,
    pub asymptote: f64,
    pub ratio_to_asymptote: f64,
    pub acceptance: f64,
    pub steps: usize,
    /// Estimate with half as many steps minus the main estimate.
    pub step_halving_shift: f64,
}

/// Endpoints of walks with `N(0, 1/steps)` steps conditioned to stay
/// positive at every step, by rejection.
pub fn meander_endpoints(replicas: usize, steps: usize, key: StreamKey) -> Result<(Vec<f64>, f64)> {
    let sd = (1.0 / steps as f64).sqrt();
    let max_attempts = (1.0 / MIN_ACCEPTANCE) as u64 * 100;
    let draws: Vec<Result<(f64, u64)>> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = key.with_level(i as u64).rng();
            for attempt in 1..=max_attempts {
                let mut s = 0.0;
                let mut alive = true;
                for _ in 0..steps {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    s += sd * z;
                    if s <= 0.0 {
                        alive = false;
                        break;
                    }
                }
                if alive {
                    return Ok((s, attempt));
                }
            }
            Err(Error::Estimator(format!("meander rejection acceptance below {MIN_ACCEPTANCE}")))
        })
        .collect();
    let mut ends = Vec::with_capacity(replicas);
    let mut attempts = 0u64;
    for d in draws {
        let (s, a) = d?;
        ends.push(s);
        attempts += a;
    }
    let acceptance = replicas as f64 / attempts.max(1) as f64;
    if acceptance < MIN_ACCEPTANCE {
        return Err(Error::Estimator(format!("meander acceptance {acceptance:e} below {MIN_ACCEPTANCE}")));
    }
    Ok((ends, acceptance))
}

/// Estimates `E[e^{C R_1}]` and compares it with the asymptote.
pub fn meander_laplace(c: f64, replicas: usize, key: StreamKey) -> Result<MeanderReport> {
    if !(0.0..=3.0).contains(&c) {
        return Err(Error::param("c", "supported range is [0, 3]"));
    }
    let (ends, acceptance) = meander_endpoints(replicas, MEANDER_STEPS, key)?;
    let vals: Vec<f64> = ends.iter().map(|r| (c * r).exp()).collect();
    let estimate = EstimateResult::from_mean(&vals).with_meta("c", c).with_meta("steps", MEANDER_STEPS);
    let (half, _) = meander_endpoints(replicas, MEANDER_STEPS / 2, key.with_tag(crate::rng::Tag::Aux))?;
    let half_mean = half.iter().map(|r| (c * r).exp()).sum::<f64>() / half.len() as f64;
    let asymptote = meander_asymptote(c);
    Ok(MeanderReport {
        c,
        ratio_to_asymptote: if asymptote > 0.0 { estimate.estimate / asymptote } else { f64::NAN },
        step_halving_shift: half_mean - estimate.estimate,
        estimate,
        asymptote,
        acceptance,
        steps: MEANDER_STEPS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, Tag};

    #[test]
    fn zero_c_is_one() {
        let r = meander_laplace(0.0, 50, derive_stream(1, Tag::Meander, 0)).unwrap();
        assert_eq!(r.estimate.estimate, 1.0);
    }

    #[test]
    fn asymptote_at_two() {
        assert!((meander_asymptote(2.0) - 37.04).abs() < 0.01);
    }

    #[test]
    fn endpoint_law_is_rayleigh() {
        let (ends, acc) = meander_endpoints(4000, 256, derive_stream(2, Tag::Meander, 0)).unwrap();
        assert!(acc > 0.02 && acc < 0.05, "{acc}");
        // E[R] = sqrt(π/2), E[R²] = 2 for Rayleigh(1); discrete walks sit slightly above.
        let m2 = ends.iter().map(|r| r * r).sum::<f64>() / ends.len() as f64;
        assert!((m2 - 2.0).abs() < 0.15, "{m2}");
        let ks = crate::stats::ks_one_sample(&ends, |r| 1.0 - (-0.5 * r * r).exp());
        assert!(ks.distance < 0.05, "{}", ks.distance);
    }

    #[test]
    fn monotone_in_c() {
        let k = derive_stream(3, Tag::Meander, 0);
        let a = meander_laplace(0.5, 500, k).unwrap().estimate.estimate;
        let b = meander_laplace(1.0, 500, k).unwrap().estimate.estimate;
        assert!(b > a && a > 1.0);
        assert!(meander_laplace(3.5, 10, k).is_err());
    }
}
