//! Samples a multi-level ⋆-scale field and writes it as CSV.

use chaoslab::fields::{make_kernel, Backend, KernelSpec, StarGrid, StarSampler};
use chaoslab::rng::{StreamKey, Tag};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kernel = make_kernel(KernelSpec::wendland(1))?;
    let sampler = StarSampler::new(&kernel, StarGrid::unit(1, 1024, 6.0, 0.5), Backend::Auto)?;
    println!("backend {:?}, levels {}", sampler.backend(), sampler.levels());
    let field = sampler.sample(StreamKey::new(7, Tag::StarField, 0));
    for j in 0..=field.levels() {
        let v = field.level(j);
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!("t = {:4.1}  Var = {:.4}  max = {:.3}", field.t(j), field.variance(j), max);
    }
    let path = std::env::temp_dir().join("star_field.csv");
    field.write_csv(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
    println!("wrote {}", path.display());
    Ok(())
}
