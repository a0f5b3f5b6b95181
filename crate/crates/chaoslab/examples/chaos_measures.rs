//! Builds every measure type from one field and checks the barrier identity.

use chaoslab::fields::{make_kernel, Backend, KernelSpec, StarGrid, StarSampler};
use chaoslab::measures::{barrier_measure, derivative_measure, seneta_heyde_measure, subcritical_measure, BoxRegion};
use chaoslab::rng::{StreamKey, Tag};

fn main() -> chaoslab::Result<()> {
    let kernel = make_kernel(KernelSpec::wendland(1))?;
    let sampler = StarSampler::new(&kernel, StarGrid::unit(1, 2048, 6.0, 0.25), Backend::Circulant)?;
    let field = sampler.sample(StreamKey::new(3, Tag::StarField, 0));
    let view = field.view();
    let gc = field.gamma_c();
    let half = BoxRegion::new(vec![0.0], vec![0.5]);
    for (name, m) in [
        ("gamma = 0.5", subcritical_measure(&view, 0.5)?),
        ("gamma = 1.0", subcritical_measure(&view, 1.0)?),
        ("critical", subcritical_measure(&view, gc)?),
        ("seneta-heyde", seneta_heyde_measure(&view)?),
        ("derivative", derivative_measure(&view)),
    ] {
        println!("{name:>13}: total {:.5}, left half {:.5}", m.total(), m.measure_of_box(&half)?);
    }
    let beta = 2.0;
    let b = barrier_measure(&view, beta)?;
    let crossed = field.barrier_min().iter().any(|&m| m < -beta);
    let rhs = b.total() - beta * subcritical_measure(&view, gc)?.total();
    println!("barrier mass {:.5}; D - beta mu = {rhs:.5}, mu' = {:.5} (barrier crossed: {crossed})", b.total(), derivative_measure(&view).total());
    Ok(())
}
