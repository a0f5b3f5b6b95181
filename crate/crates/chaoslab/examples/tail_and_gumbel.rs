//! Tail of the derivative mass on a ⋆-scale field, and the Gumbel law of the
//! circle's critical mass.

use chaoslab::fields::{make_kernel, sample_circle_gff, Backend, KernelSpec, StarGrid, StarSampler};
use chaoslab::measures::derivative_total;
use chaoslab::rng::{StreamKey, Tag};
use chaoslab::stats::{gumbel_test, tail_estimate};
use rayon::prelude::*;

fn main() -> chaoslab::Result<()> {
    let kernel = make_kernel(KernelSpec::wendland(1))?;
    let s = StarSampler::new(&kernel, StarGrid::unit(1, 256, 4.0, 0.25), Backend::Circulant)?;
    let masses: Vec<f64> = (0..20_000u64).into_par_iter().map(|r| derivative_total(&s.sample(StreamKey::new(10, Tag::StarField, r)).view())).collect();
    let thresholds: Vec<f64> = (-4..=6).map(|k| 10f64.powf(k as f64 / 6.0)).collect();
    let tail = tail_estimate(&masses, &thresholds, 1.0, 1)?;
    for p in &tail.points {
        println!("x = {:8.3}: x P(M > x) = {:.4} ± {:.4} ({} exceedances)", p.threshold, p.scaled, p.std_error, p.exceedances);
    }
    println!("target {:.4}, plateau run {}", tail.target, tail.plateau_run);
    let circle: Vec<f64> = (0..500u64)
        .into_par_iter()
        .map(|r| sample_circle_gff(1 << 12, 1 << 13, true, StreamKey::new(10, Tag::Circle, r)).map(|f| derivative_total(&f.view())))
        .collect::<chaoslab::Result<_>>()?;
    let g = gumbel_test(&circle)?;
    println!("circle: KS {:.4}, median sqrt2*mass {:.4} (target {:.4})", g.ks_distance, g.median_scaled_mass, g.median_target);
    Ok(())
}
