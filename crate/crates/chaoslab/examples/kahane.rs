//! Convexity comparison for a field and the same field plus an independent
//! constant shift.

use chaoslab::fields::{make_kernel, Backend, KernelSpec, StarGrid, StarSampler};
use chaoslab::measures::subcritical_total;
use chaoslab::rng::{StreamKey, Tag};
use chaoslab::stats::kahane_compare;
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> chaoslab::Result<()> {
    let kernel = make_kernel(KernelSpec::wendland(1))?;
    let s = StarSampler::new(&kernel, StarGrid::unit(1, 256, 4.0, 0.25), Backend::Circulant)?;
    let (gamma, c) = (0.5, 0.5);
    let j = s.levels();
    let cov_a = |x: usize, y: usize| s.covariance(j, x, y);
    let cov_b = |x: usize, y: usize| s.covariance(j, x, y) + c;
    let mass_a = |i: usize| Ok(subcritical_total(&s.sample(StreamKey::new(1, Tag::Kahane, i as u64)).view(), gamma));
    let mass_b = |i: usize| {
        let z: f64 = StreamKey::new(1, Tag::Shift, i as u64).rng().sample(StandardNormal);
        let m = subcritical_total(&s.sample(StreamKey::new(1, Tag::Aux, i as u64)).view(), gamma);
        Ok(m * (gamma * c.sqrt() * z - 0.5 * gamma * gamma * c).exp())
    };
    let r = kahane_compare(256, &cov_a, &cov_b, mass_a, mass_b, |x| x * x, 4000)?;
    println!("E[F(A)] = {:.4} ± {:.4}, E[F(B)] = {:.4} ± {:.4}, z = {:.2}, rejected: {}", r.mean_a, r.se_a, r.mean_b, r.se_b, r.z, r.rejected);
    Ok(())
}
