//! Circle GFF: pointwise variance and its critical chaos mass.

use chaoslab::fields::{harmonic_number, sample_circle_gff};
use chaoslab::measures::derivative_total;
use chaoslab::rng::{StreamKey, Tag};

fn main() -> chaoslab::Result<()> {
    let n = 1 << 10;
    let mut sq = 0.0;
    let reps = 200;
    for r in 0..reps {
        let f = sample_circle_gff(n, 2 * n, true, StreamKey::new(1, Tag::Circle, r))?;
        sq += f.values.iter().map(|x| x * x).sum::<f64>() / f.values.len() as f64;
        if r < 5 {
            println!("replica {r}: derivative mass {:.4}", derivative_total(&f.view()));
        }
    }
    println!("empirical variance {:.4}, exact H_N = {:.4}", sq / reps as f64, harmonic_number(n));
    Ok(())
}
