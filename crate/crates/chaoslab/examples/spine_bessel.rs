//! Rooted sampler and the Bessel(3) law of the barrier-tilted spine.

use chaoslab::fields::{make_kernel, Backend, KernelSpec, StarGrid, StarSampler};
use chaoslab::rng::{StreamKey, Tag};
use chaoslab::spine::{bessel_spine_check, importance_identity_check, Functional};

fn main() -> chaoslab::Result<()> {
    let kernel = make_kernel(KernelSpec::wendland(1))?;
    let s = StarSampler::new(&kernel, StarGrid::unit(1, 256, 4.0, 0.25), Backend::Circulant)?;
    for f in Functional::BATTERY {
        let c = importance_identity_check(&s, f, 1.0, 2000, 8)?;
        println!("{:>17}: P {:.4} ± {:.4}  Q {:.4} ± {:.4}  z {:+.2}", f.name(), c.p_estimate, c.p_se, c.q_estimate, c.q_se, c.z);
    }
    let b = bessel_spine_check(1.0, 4.0, 0.05, 40_000, StreamKey::new(8, Tag::Spine, 0))?;
    println!("E[R^2] = {:.3} ± {:.3} (target {}), ESS {:.0}, KS {:.4}", b.second_moment, b.second_moment_se, b.target, b.ess, b.ks.distance);
    Ok(())
}
