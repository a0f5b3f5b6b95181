//! Box-moment scaling exponents of subcritical and derivative measures.

use chaoslab::fields::{make_kernel, Backend, KernelSpec, StarGrid, StarSampler};
use chaoslab::measures::{derivative_measure, subcritical_measure};
use chaoslab::rng::{StreamKey, Tag};
use chaoslab::stats::{moment_scaling, Exponent};

fn main() -> chaoslab::Result<()> {
    let kernel = make_kernel(KernelSpec::wendland(1))?;
    let t = 7.0;
    let s = StarSampler::new(&kernel, StarGrid::unit(1, 4096, t, 0.5), Backend::Circulant)?;
    let radii = [0.025, 0.05, 0.1, 0.25];
    let key = |i: usize| StreamKey::new(9, Tag::StarField, i as u64);
    for q in [0.3, 0.5] {
        let e = Exponent::Subcritical { dim: 1, gamma: 1.0, q };
        let fit = moment_scaling(|i| subcritical_measure(&s.sample(key(i)).view(), 1.0), 100, &radii, t, e)?;
        println!("gamma = 1, q = {q}: slope {:.3} (target {:.3})", fit.slope, e.value());
        let e = Exponent::Critical { dim: 1, q };
        let fit = moment_scaling(|i| Ok(derivative_measure(&s.sample(key(i)).view())), 100, &radii, t, e)?;
        println!("derivative, q = {q}: slope {:.3} (target {:.3})", fit.slope, e.value());
    }
    Ok(())
}
