//! Validates the built-in seed kernels and a tabulated one, printing the
//! invariant report and a few covariance values.

use chaoslab::fields::{analytic_covariance, make_kernel, KernelSpec};

fn main() -> chaoslab::Result<()> {
    for spec in [KernelSpec::wendland(1), KernelSpec::wendland(2), KernelSpec::triangular()] {
        let k = make_kernel(spec)?;
        println!("{}", k.report().to_json());
        for r in [0.01, 0.1, 0.5] {
            println!("  K_8({r}) = {:.6}  (-ln r = {:.6})", analytic_covariance(&k, r, 8.0), -f64::ln(r));
        }
    }
    let table: Vec<f64> = (0..=64).map(|i| 1.0 - i as f64 / 64.0).collect();
    let k = make_kernel(KernelSpec::tabulated(1, table))?;
    println!("tabulated passes: {}", k.report().passed());
    // A kernel that is not positive definite on the lattice is refused.
    let bump: Vec<f64> = (0..=64).map(|i| if i < 60 { 1.0 } else { 0.0 }).collect();
    match make_kernel(KernelSpec::tabulated(1, bump)) {
        Ok(_) => println!("step kernel accepted"),
        Err(e) => println!("step kernel rejected: {e}"),
    }
    Ok(())
}
