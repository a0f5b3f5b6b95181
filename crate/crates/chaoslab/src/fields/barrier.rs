/// Probability that a Brownian bridge of variance `var` from `a0 > 0` to
/// `a1 > 0` stays positive.
#[inline]
pub fn bridge_factor(a0: f64, a1: f64, var: f64) -> f64 {
    if a0 <= 0.0 || a1 <= 0.0 {
        return 0.0;
    }
    if var <= 0.0 {
        return 1.0;
    }
    -(-2.0 * a0 * a1 / var).exp_m1()
}

/// Per-point barrier bookkeeping along a multi-level trajectory, for the
/// path `S_j = -X_j + gamma_c Var_j` and barrier level `-beta`.
///
/// Two rules are tracked side by side: the discrete running minimum of
/// `S_j`, and the bridge-corrected survival weight, i.e. the conditional
/// probability that the continuous path stayed above `-beta` given the
/// observed levels.
#[derive(Debug, Clone)]
pub struct BarrierTracker {
    beta: f64,
    gamma_c: f64,
    min: Vec<f64>,
    survival: Vec<f64>,
    shifted: Vec<f64>,
}

impl BarrierTracker {
    pub fn new(points: usize, beta: f64, gamma_c: f64) -> Self {
        BarrierTracker { beta, gamma_c, min: vec![0.0; points], survival: vec![1.0; points], shifted: vec![beta; points] }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Feeds the next level `X_j` with realized variance `Var_j` and
    /// increment variance `Var_j - Var_{j-1}`.
    pub fn update(&mut self, values: &[f64], variance: f64, increment_variance: f64) {
        for (i, &x) in values.iter().enumerate() {
            let s = -x + self.gamma_c * variance;
            let a = s + self.beta;
            if s < self.min[i] {
                self.min[i] = s;
            }
            if self.survival[i] > 0.0 {
                self.survival[i] *= bridge_factor(self.shifted[i], a, increment_variance);
            }
            self.shifted[i] = a;
        }
    }

    /// Running minimum of `S_j` (discrete rule).
    pub fn min(&self) -> &[f64] {
        &self.min
    }

    /// Bridge-corrected survival weights in `[0, 1]`.
    pub fn survival(&self) -> &[f64] {
        &self.survival
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bridge_factor_limits() {
        assert_eq!(bridge_factor(-0.1, 1.0, 1.0), 0.0);
        assert_eq!(bridge_factor(10.0, 10.0, 0.1), 1.0);
        assert!((bridge_factor(1.0, 1.0, 2.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn tracker_follows_minimum() {
        let mut tr = BarrierTracker::new(2, 1.0, 2f64.sqrt());
        tr.update(&[0.5, -0.5], 0.1, 0.1);
        tr.update(&[2.0, -0.2], 0.2, 0.1);
        let g = 2f64.sqrt();
        assert!((tr.min()[0] - (-2.0 + 0.2 * g)).abs() < 1e-15);
        assert_eq!(tr.min()[1], 0.0);
        assert_eq!(tr.survival()[0], 0.0);
        assert!(tr.survival()[1] > 0.9 && tr.survival()[1] < 1.0);
    }
}
