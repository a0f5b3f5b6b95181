//! Runs an experiment through the library entry point, the same path the
//! `chaoslab` binary takes.

use chaoslab::cli::{run_experiment, ExperimentConfig};

fn main() -> chaoslab::Result<()> {
    let text = "kind = sh-ratio\nm = 1024\nt_max = 6\ndt = 0.5\nreplicas = 64\nseed = 3\n";
    let mut cfg = ExperimentConfig::parse(text)?;
    cfg.out = std::env::temp_dir().join("chaoslab-sh").to_string_lossy().into_owned();
    let out = run_experiment(&cfg)?;
    for c in &out.report.checks {
        println!("{} {}: observed {:.4}, target {:.4}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.observed, c.target);
    }
    println!("config hash {}", out.manifest.config_hash);
    println!("outputs in {}: {:?}", cfg.out, out.manifest.outputs);
    Ok(())
}
