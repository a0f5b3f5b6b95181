use super::estimate::mean_and_se;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleReport {
    pub mean_difference: f64,
    pub std_error: f64,
    pub z: f64,
    pub pairs: usize,
    /// `|z| > 3`.
    pub flagged: bool,
    pub warning: Option<String>,
}

/// Paired-difference test of `E[V_{j+1} - V_j] = 0` from `(V_j, V_{j+1})` pairs.
pub fn martingale_check(pairs: &[(f64, f64)]) -> MartingaleReport {
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| b - a).collect();
    let (m, se) = mean_and_se(&diffs);
    let z = if se > 0.0 {
        m / se
    } else if m == 0.0 || diffs.is_empty() {
        0.0
    } else {
        m.signum() * f64::INFINITY
    };
    MartingaleReport {
        mean_difference: if diffs.is_empty() { 0.0 } else { m },
        std_error: if diffs.is_empty() { 0.0 } else { se },
        z,
        pairs: pairs.len(),
        flagged: z.abs() > 3.0,
        warning: (pairs.len() < 100).then(|| format!("only {} pairs", pairs.len())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_process() {
        let r = martingale_check(&vec![(2.0, 2.0); 500]);
        assert_eq!(r.z, 0.0);
        assert!(!r.flagged && r.warning.is_none());
        assert!(martingale_check(&[(1.0, 1.0)]).warning.is_some());
    }

    #[test]
    fn drift_is_flagged() {
        let pairs: Vec<(f64, f64)> = (0..1000).map(|i| (0.0, 1.0 + (i % 7) as f64 * 0.01)).collect();
        assert!(martingale_check(&pairs).flagged);
    }
}
