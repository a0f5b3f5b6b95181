//! Branching random walk: martingale trajectories along one realization and
//! the mean of `M_n` over many.

use chaoslab::brw::{additive_martingale, martingale_trajectory, normalization_factor, simulate_brw};
use chaoslab::rng::{StreamKey, Tag};

fn main() -> chaoslab::Result<()> {
    println!("normalization factor at gamma = 0.7: {}", normalization_factor(0.7, 1));
    let st = simulate_brw(1, 14, StreamKey::new(2, Tag::Brw, 0))?;
    for (n, m, d) in martingale_trajectory(&st, 0.7, 1.0)? {
        println!("n = {n:2}  M = {m:.4}  D = {d:.4}");
    }
    let reps = 2000;
    let mean: f64 = (0..reps)
        .map(|r| simulate_brw(1, 10, StreamKey::new(2, Tag::Brw, r)).map(|s| additive_martingale(&s, 0.7)))
        .sum::<chaoslab::Result<f64>>()?
        / reps as f64;
    println!("E[M_10] ~ {mean:.4} (exactly 1)");
    Ok(())
}
