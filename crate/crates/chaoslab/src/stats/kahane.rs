use super::estimate::mean_and_se;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KahaneReport {
    pub mean_a: f64,
    pub se_a: f64,
    pub mean_b: f64,
    pub se_b: f64,
    /// `(mean_a - mean_b) / se`: large positive values contradict the inequality.
    pub z: f64,
    /// `z > 3`.
    pub rejected: bool,
    pub replicas: usize,
}

/// Errors unless `cov_a(i, j) <= cov_b(i, j) + tol` for every pair of points.
pub fn check_domination(points: usize, cov_a: &dyn Fn(usize, usize) -> f64, cov_b: &dyn Fn(usize, usize) -> f64, tol: f64) -> Result<()> {
    for i in 0..points {
        for j in i..points {
            let (a, b) = (cov_a(i, j), cov_b(i, j));
            if a > b + tol {
                return Err(Error::Estimator(format!("covariance domination fails at ({i}, {j}): {a} > {b}")));
            }
        }
    }
    Ok(())
}

/// One-sided test of `E[F(mass_A)] <= E[F(mass_B)]` from independent replicas.
///
/// Domination of the covariances is checked on the grid before any sampling.
pub fn kahane_compare<A, B, F>(
    points: usize,
    cov_a: &dyn Fn(usize, usize) -> f64,
    cov_b: &dyn Fn(usize, usize) -> f64,
    sample_a: A,
    sample_b: B,
    f: F,
    replicas: usize,
) -> Result<KahaneReport>
where
    A: Fn(usize) -> Result<f64> + Sync,
    B: Fn(usize) -> Result<f64> + Sync,
    F: Fn(f64) -> f64 + Sync,
{
    check_domination(points, cov_a, cov_b, 1e-12)?;
    let fa: Vec<f64> = (0..replicas).into_par_iter().map(|i| sample_a(i).map(&f)).collect::<Result<_>>()?;
    let fb: Vec<f64> = (0..replicas).into_par_iter().map(|i| sample_b(i).map(&f)).collect::<Result<_>>()?;
    let (ma, sa) = mean_and_se(&fa);
    let (mb, sb) = mean_and_se(&fb);
    let se = (sa * sa + sb * sb).sqrt();
    let z = if se > 0.0 { (ma - mb) / se } else { 0.0 };
    Ok(KahaneReport { mean_a: ma, se_a: sa, mean_b: mb, se_b: sb, z, rejected: z > 3.0, replicas })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domination_violation_errors_before_sampling() {
        let a = |_: usize, _: usize| 2.0;
        let b = |_: usize, _: usize| 1.0;
        let r = kahane_compare(3, &a, &b, |_| panic!("sampled"), |_| Ok(0.0), |x| x, 10);
        assert!(r.is_err());
    }

    #[test]
    fn identical_deterministic_samplers() {
        let c = |_: usize, _: usize| 1.0;
        let r = kahane_compare(2, &c, &c, |i| Ok(i as f64), |i| Ok(i as f64), |x| x * x, 100).unwrap();
        assert_eq!(r.z, 0.0);
        assert!(!r.rejected);
    }
}
