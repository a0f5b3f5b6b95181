//! Seed kernels for ⋆-scale fields and their covariance integrals.

use super::fft::GridFft;
use crate::quad::{self, Quadrature};
use crate::{Error, Result};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    /// `(1-r)_+^4 (4r+1)`, positive definite up to d = 3.
    Wendland,
    /// `(1-r)_+`, d = 1 only.
    #[serde(rename = "triangular-1d")]
    Triangular1d,
    /// Values on a uniform grid of `[0, 1]`, interpolated by monotone cubics.
    UserTabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub dim: usize,
    /// Required for `UserTabulated`: `k(i / (len-1))` for `i = 0..len`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<f64>>,
}

impl KernelSpec {
    pub fn wendland(dim: usize) -> Self {
        KernelSpec { family: KernelFamily::Wendland, dim, table: None }
    }

    pub fn triangular() -> Self {
        KernelSpec { family: KernelFamily::Triangular1d, dim: 1, table: None }
    }

    pub fn tabulated(dim: usize, table: Vec<f64>) -> Self {
        KernelSpec { family: KernelFamily::UserTabulated, dim, table: Some(table) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub invariant: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub family: KernelFamily,
    pub dim: usize,
    pub checks: Vec<InvariantCheck>,
    /// Smallest DFT coefficient of the sampled kernel (scaled by cell volume).
    pub min_dft: f64,
    pub dft_grid: usize,
    pub dft_spacing: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Fourier nonnegativity tolerance.
pub const DFT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Kernel {
    spec: KernelSpec,
    interp: Option<Pchip>,
    report: ValidationReport,
}

impl Kernel {
    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r >= 1.0 {
            return 0.0;
        }
        match self.spec.family {
            KernelFamily::Wendland => {
                let u = 1.0 - r;
                let u2 = u * u;
                u2 * u2 * (4.0 * r + 1.0)
            }
            KernelFamily::Triangular1d => 1.0 - r,
            KernelFamily::UserTabulated => self.interp.as_ref().expect("tabulated kernel has a table").eval(r),
        }
    }
}

/// Validates `spec` and returns an evaluable kernel.
pub fn make_kernel(spec: KernelSpec) -> Result<Kernel> {
    if !(1..=2).contains(&spec.dim) {
        return Err(Error::InvalidKernel { invariant: "dimension", detail: format!("d = {} (supported: 1, 2)", spec.dim) });
    }
    if spec.family == KernelFamily::Triangular1d && spec.dim != 1 {
        return Err(Error::InvalidKernel {
            invariant: "dimension",
            detail: "the triangular kernel is only positive definite in d = 1".into(),
        });
    }
    let interp = match spec.family {
        KernelFamily::UserTabulated => {
            let table = spec.table.as_ref().ok_or(Error::InvalidKernel {
                invariant: "tabulation",
                detail: "user-tabulated family needs a table".into(),
            })?;
            if table.len() < 3 || table.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidKernel {
                    invariant: "tabulation",
                    detail: "need at least 3 finite values on [0, 1]".into(),
                });
            }
            Some(Pchip::new(table))
        }
        _ => None,
    };
    let placeholder = ValidationReport { family: spec.family, dim: spec.dim, checks: vec![], min_dft: 0.0, dft_grid: 0, dft_spacing: 0.0 };
    let mut kernel = Kernel { spec, interp, report: placeholder };
    kernel.report = validate(&kernel);
    if let Some(bad) = kernel.report.checks.iter().find(|c| !c.passed) {
        let invariant = match bad.invariant.as_str() {
            "k(0) = 1" => "k(0) = 1",
            "support in unit ball" => "support in unit ball",
            "radially non-increasing" => "radially non-increasing",
            _ => "Fourier nonnegativity",
        };
        return Err(Error::InvalidKernel { invariant, detail: bad.detail.clone() });
    }
    Ok(kernel)
}

fn validate(kernel: &Kernel) -> ValidationReport {
    let mut checks = Vec::new();
    let k0 = kernel.eval(0.0);
    checks.push(InvariantCheck {
        invariant: "k(0) = 1".into(),
        passed: k0 == 1.0,
        detail: format!("k(0) = {k0:.17e}"),
    });

    // Support: value at the edge of the ball must vanish so the kernel is
    // continuous there (beyond 1 it is zero by construction).
    let edge = match &kernel.spec.table {
        Some(t) if kernel.spec.family == KernelFamily::UserTabulated => *t.last().unwrap(),
        _ => kernel.eval(1.0 - 1e-12),
    };
    checks.push(InvariantCheck {
        invariant: "support in unit ball".into(),
        passed: edge.abs() <= 1e-9,
        detail: format!("k(1-) = {edge:e}"),
    });

    let probe = 4096;
    let mut worst_rise = 0.0f64;
    let mut prev = kernel.eval(0.0);
    for i in 1..=probe {
        let v = kernel.eval(i as f64 / probe as f64);
        worst_rise = worst_rise.max(v - prev);
        prev = v;
    }
    checks.push(InvariantCheck {
        invariant: "radially non-increasing".into(),
        passed: worst_rise <= 1e-14,
        detail: format!("largest increase on probe grid {worst_rise:e}"),
    });

    let (min_dft, n, h) = min_lattice_dft(kernel);
    checks.push(InvariantCheck {
        invariant: "Fourier nonnegativity".into(),
        passed: min_dft >= -DFT_TOLERANCE,
        detail: format!("min DFT {min_dft:e} on {n}^{} grid, spacing {h}", kernel.dim()),
    });

    ValidationReport { family: kernel.spec.family, dim: kernel.dim(), checks, min_dft, dft_grid: n, dft_spacing: h }
}

/// Minimum of the periodized DFT of the sampled kernel (period 4, so the
/// support never wraps onto itself).
fn min_lattice_dft(kernel: &Kernel) -> (f64, usize, f64) {
    let (n, h): (usize, f64) = if kernel.dim() == 1 { (1024, 1.0 / 256.0) } else { (128, 1.0 / 32.0) };
    let wrap = |i: usize| if i <= n / 2 { i as f64 } else { (n - i) as f64 };
    let vol = h.powi(kernel.dim() as i32);
    let mut data: Vec<Complex64> = if kernel.dim() == 1 {
        (0..n).map(|i| Complex64::new(kernel.eval(wrap(i) * h) * vol, 0.0)).collect()
    } else {
        (0..n * n)
            .map(|idx| {
                let (a, b) = (wrap(idx / n), wrap(idx % n));
                Complex64::new(kernel.eval(h * (a * a + b * b).sqrt()) * vol, 0.0)
            })
            .collect()
    };
    GridFft::new(kernel.dim(), n).process(&mut data, &mut Vec::new());
    let min = data.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
    (min, n, h)
}

/// Quadrature target for covariance integrals.
pub const COVARIANCE_TOL: f64 = 1e-10;

/// `∫_t^{t+Δt} k(e^s r) ds`, with error estimate.
pub fn increment_covariance_quad(kernel: &Kernel, r: f64, t: f64, dt: f64) -> Quadrature {
    let r = r.abs();
    if r == 0.0 {
        return Quadrature { value: dt, error: 0.0, converged: true, evaluations: 0 };
    }
    // Beyond s = -ln r the argument leaves the support.
    let hi = (t + dt).min(-r.ln());
    if hi <= t {
        return Quadrature { value: 0.0, error: 0.0, converged: true, evaluations: 0 };
    }
    quad::integrate(|s: f64| kernel.eval(s.exp() * r), t, hi, COVARIANCE_TOL * 1e-2, 400)
}

/// Covariance of the increment over `[t, t+Δt]` between points at distance `r`.
pub fn increment_covariance(kernel: &Kernel, r: f64, t: f64, dt: f64) -> f64 {
    increment_covariance_quad(kernel, r, t, dt).value
}

/// `K_t(r) = ∫_0^t k(e^s r) ds`, computed directly by quadrature.
pub fn analytic_covariance(kernel: &Kernel, r: f64, t: f64) -> f64 {
    increment_covariance_quad(kernel, r, 0.0, t).value
}

/// Monotone piecewise-cubic Hermite interpolant on a uniform grid of [0, 1].
#[derive(Debug, Clone)]
struct Pchip {
    y: Vec<f64>,
    d: Vec<f64>,
    h: f64,
}

impl Pchip {
    fn new(y: &[f64]) -> Self {
        let n = y.len();
        let h = 1.0 / (n - 1) as f64;
        let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let (a, b) = (delta[i - 1], delta[i]);
            d[i] = if a * b <= 0.0 { 0.0 } else { 2.0 / (1.0 / a + 1.0 / b) };
        }
        d[0] = end_slope(delta[0], delta.get(1).copied().unwrap_or(delta[0]));
        d[n - 1] = end_slope(delta[n - 2], if n > 2 { delta[n - 3] } else { delta[n - 2] });
        Pchip { y: y.to_vec(), d, h }
    }

    fn eval(&self, r: f64) -> f64 {
        let n = self.y.len();
        let pos = (r / self.h).min((n - 1) as f64);
        let i = (pos as usize).min(n - 2);
        let s = pos - i as f64;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i] * self.h, self.d[i + 1] * self.h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * d0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * d1
    }
}

fn end_slope(d0: f64, d1: f64) -> f64 {
    let s = 1.5 * d0 - 0.5 * d1;
    if s * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}
