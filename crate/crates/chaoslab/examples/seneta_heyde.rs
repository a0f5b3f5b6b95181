//! Seneta–Heyde ratio on a ⋆-scale field and on the branching random walk,
//! plus the meander Laplace transform behind the constant.

use chaoslab::brw::{derivative_martingale_plain, seneta_heyde_brw, simulate_brw};
use chaoslab::fields::{make_kernel, Backend, KernelSpec, StarGrid, StarSampler};
use chaoslab::measures::{derivative_total, subcritical_total};
use chaoslab::rng::{StreamKey, Tag};
use chaoslab::stats::{meander_laplace, sh_ratio};

fn main() -> chaoslab::Result<()> {
    let t = 7.0;
    let kernel = make_kernel(KernelSpec::wendland(1))?;
    let s = StarSampler::new(&kernel, StarGrid::unit(1, 2048, t, 0.5), Backend::Circulant)?;
    let pairs: Vec<(f64, f64)> = (0..100)
        .map(|r| {
            let f = s.sample(StreamKey::new(4, Tag::StarField, r));
            let v = f.view();
            (t.sqrt() * subcritical_total(&v, f.gamma_c()), derivative_total(&v))
        })
        .collect();
    let rep = sh_ratio(&pairs)?;
    println!("field: median ratio {:.3} (target {:.4})", rep.median.estimate, rep.target);
    let pairs: Vec<(f64, f64)> = (0..200)
        .map(|r| {
            let st = simulate_brw(1, 16, StreamKey::new(4, Tag::Brw, r)).expect("valid depth");
            (seneta_heyde_brw(&st).expect("n > 0"), derivative_martingale_plain(&st))
        })
        .collect();
    println!("brw:   median ratio {:.3}", sh_ratio(&pairs)?.median.estimate);
    let m = meander_laplace(1.0, 20_000, StreamKey::new(4, Tag::Meander, 0))?;
    println!("meander E[e^R] = {:.4}, closed form {:.4}", m.estimate.estimate, chaoslab::stats::meander_exact(1.0));
    Ok(())
}
