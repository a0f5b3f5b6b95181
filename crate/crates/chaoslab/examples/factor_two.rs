//! Subcritical mass over `gamma_c - gamma` against the derivative mass.

use chaoslab::fields::{make_kernel, Backend, KernelSpec, StarGrid, StarSampler};
use chaoslab::measures::{derivative_total, subcritical_total};
use chaoslab::rng::{StreamKey, Tag};
use chaoslab::stats::ratio_summary;

fn main() -> chaoslab::Result<()> {
    let kernel = make_kernel(KernelSpec::wendland(1))?;
    let s = StarSampler::new(&kernel, StarGrid::unit(1, 2048, 7.0, 0.5), Backend::Circulant)?;
    let gc = chaoslab::gamma_c(1);
    let fields: Vec<_> = (0..100).map(|r| s.sample(StreamKey::new(5, Tag::StarField, r))).collect();
    for delta in [0.4, 0.3, 0.2] {
        let g = gc - delta;
        let pairs: Vec<(f64, f64)> = fields
            .iter()
            .map(|f| {
                let v = f.view();
                (subcritical_total(&v, g) / delta, derivative_total(&v))
            })
            .collect();
        let r = ratio_summary(&pairs, 2.0)?;
        println!("gamma_c - {delta}: median {:.3}, mean {:.3}", r.median.estimate, r.mean.estimate);
    }
    Ok(())
}
