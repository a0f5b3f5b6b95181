//! Distributional ⋆-equation: the mass at cutoff T against the composite of
//! an outer cutoff-t field and an independent rescaled inner measure.

use chaoslab::fields::{make_kernel, KernelSpec};
use chaoslab::stats::{median, star_equation_check};

fn main() -> chaoslab::Result<()> {
    let kernel = make_kernel(KernelSpec::wendland(1))?;
    let r = star_equation_check(&kernel, 0.8, 1.0, 6.0, 1024, 0.25, 300, 12)?;
    println!("median lhs {:.4}, median rhs {:.4}", median(&r.lhs), median(&r.rhs));
    println!("KS {:.4} (p = {:.3})", r.ks.distance, r.ks.p_value);
    Ok(())
}
