use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// 97.5% standard normal quantile.
const Z975: f64 = 1.959_963_984_540_054;

/// Monte Carlo point estimate with its uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub estimate: f64,
    pub std_error: f64,
    pub n_replicas: usize,
    pub ci95: (f64, f64),
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl EstimateResult {
    /// Sample mean with its standard error and a normal 95% interval.
    pub fn from_mean(samples: &[f64]) -> Self {
        let (m, se) = mean_and_se(samples);
        EstimateResult { estimate: m, std_error: se, n_replicas: samples.len(), ci95: (m - Z975 * se, m + Z975 * se), metadata: BTreeMap::new() }
    }

    /// Sample median with a distribution-free order-statistic interval; the
    /// standard error is the interval half-width over 1.96.
    pub fn from_median(samples: &[f64]) -> Self {
        let mut s: Vec<f64> = samples.to_vec();
        s.sort_by(f64::total_cmp);
        let n = s.len();
        if n == 0 {
            return EstimateResult { estimate: f64::NAN, std_error: f64::NAN, n_replicas: 0, ci95: (f64::NAN, f64::NAN), metadata: BTreeMap::new() };
        }
        let med = quantile_sorted(&s, 0.5);
        let half = Z975 * (n as f64).sqrt() / 2.0;
        let lo = ((n as f64 / 2.0 - half).floor().max(0.0) as usize).min(n - 1);
        let hi = ((n as f64 / 2.0 + half).ceil() as usize).min(n - 1);
        let (a, b) = (s[lo].min(med), s[hi].max(med));
        EstimateResult { estimate: med, std_error: (b - a) / (2.0 * Z975), n_replicas: n, ci95: (a, b), metadata: BTreeMap::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }
}

pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    if samples.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (m, 0.0);
    }
    let var = samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

fn quantile_sorted(s: &[f64], p: f64) -> f64 {
    let pos = p * (s.len() - 1) as f64;
    let i = pos.floor() as usize;
    let f = pos - i as f64;
    if i + 1 < s.len() { s[i] * (1.0 - f) + s[i + 1] * f } else { s[i] }
}

/// Linear-interpolation quantile (type 7).
pub fn quantile(samples: &[f64], p: f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    quantile_sorted(&s, p)
}

pub fn median(samples: &[f64]) -> f64 {
    quantile(samples, 0.5)
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}
