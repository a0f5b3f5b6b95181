use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub distance: f64,
    pub p_value: f64,
    pub n1: usize,
    /// Zero for one-sample tests; effective size for weighted samples.
    pub n2: usize,
}

/// Asymptotic Kolmogorov p-value with the usual small-sample correction.
pub fn kolmogorov_pvalue(distance: f64, n_eff: f64) -> f64 {
    let sq = n_eff.sqrt();
    let lambda = (sq + 0.12 + 0.11 / sq) * distance;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// `sup |F_n - F|` for a continuous reference CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsReport {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max(((i + 1) as f64 / n - f).abs()).max((f - i as f64 / n).abs());
    }
    KsReport { distance: d, p_value: kolmogorov_pvalue(d, n), n1: s.len(), n2: 0 }
}

/// Two-sample statistic for weighted samples `a` against unweighted `b`.
pub fn ks_weighted_two_sample(a: &[(f64, f64)], b: &[f64]) -> KsReport {
    let mut aa: Vec<(f64, f64)> = a.iter().copied().filter(|(_, w)| *w > 0.0).collect();
    aa.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut bb = b.to_vec();
    bb.sort_by(f64::total_cmp);
    let wa: f64 = aa.iter().map(|p| p.1).sum();
    let wa2: f64 = aa.iter().map(|p| p.1 * p.1).sum();
    let nb = bb.len() as f64;
    let (mut i, mut j) = (0usize, 0usize);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut d = 0.0f64;
    while i < aa.len() || j < bb.len() {
        let xa = aa.get(i).map_or(f64::INFINITY, |p| p.0);
        let xb = bb.get(j).copied().unwrap_or(f64::INFINITY);
        let x = xa.min(xb);
        while i < aa.len() && aa[i].0 == x {
            fa += aa[i].1 / wa;
            i += 1;
        }
        while j < bb.len() && bb[j] == x {
            fb += 1.0 / nb;
            j += 1;
        }
        d = d.max((fa - fb).abs());
    }
    let ess = if wa2 > 0.0 { wa * wa / wa2 } else { 0.0 };
    let n_eff = ess * nb / (ess + nb);
    KsReport { distance: d, p_value: kolmogorov_pvalue(d, n_eff), n1: ess.round() as usize, n2: bb.len() }
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsReport {
    let wa: Vec<(f64, f64)> = a.iter().map(|&x| (x, 1.0)).collect();
    let mut r = ks_weighted_two_sample(&wa, b);
    r.n1 = a.len();
    r
}
