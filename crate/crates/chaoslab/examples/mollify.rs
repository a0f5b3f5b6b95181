//! Mollifying a fine ⋆-scale field and the chaos mass of the result.

use chaoslab::fields::{convolve_field, make_kernel, Backend, Cutoff, FieldView, KernelSpec, MollifierProfile, MollifierSpec, StarGrid, StarSampler};
use chaoslab::measures::subcritical_total;
use chaoslab::rng::{StreamKey, Tag};

fn main() -> chaoslab::Result<()> {
    let kernel = make_kernel(KernelSpec::wendland(1))?;
    let s = StarSampler::new(&kernel, StarGrid::unit(1, 4096, 8.0, 0.5), Backend::Circulant)?;
    let field = s.sample(StreamKey::new(11, Tag::StarField, 0));
    for eps in [0.01, 0.003, 0.001] {
        for profile in [MollifierProfile::Bump, MollifierProfile::Polynomial] {
            let smooth = convolve_field(field.final_values(), 1, &MollifierSpec { profile, eps })?;
            let var = smooth.iter().map(|x| x * x).sum::<f64>() / smooth.len() as f64;
            let view = FieldView::on_unit_cube(&smooth, 1, var, Cutoff::Epsilon { eps });
            println!("eps = {eps:<6} {profile:?}: empirical Var {var:.3}, mass at gamma = 1 {:.4}", subcritical_total(&view, 1.0));
        }
    }
    Ok(())
}
