//! Multi-level sampler for ⋆-scale invariant fields.
//!
//! Level `j` adds an independent centred Gaussian increment whose
//! covariance at distance `r` is `∫_{t_{j-1}}^{t_j} k(e^s r) ds`. The lag
//! table of every level is computed once by quadrature; sampling then uses
//! either circulant embedding (one complex FFT per two levels) or a dense
//! Cholesky factor.

use super::barrier::BarrierTracker;
use super::fft::{negate_index, GridFft};
use super::kernel::{increment_covariance_quad, Kernel, COVARIANCE_TOL};
use super::{Cutoff, FieldView};
use crate::rng::{StreamKey, StreamRng};
use crate::{Error, Result};
use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// Largest point count for which `Backend::Auto` picks Cholesky.
pub const AUTO_CHOLESKY_MAX_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Auto,
    Cholesky,
    Circulant,
}

/// Geometry and scale ladder of a ⋆-scale sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarGrid {
    pub dim: usize,
    /// Cells per side.
    pub m: usize,
    /// The grid covers `[0, extent]^d`.
    pub extent: f64,
    pub t_max: f64,
    pub dt: f64,
}

impl StarGrid {
    pub fn unit(dim: usize, m: usize, t_max: f64, dt: f64) -> Self {
        StarGrid { dim, m, extent: 1.0, t_max, dt }
    }

    pub fn points(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.m as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn levels(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    /// Cell-centred coordinates of flat point `i`.
    pub fn coordinates(&self, i: usize) -> Vec<f64> {
        let h = self.spacing();
        match self.dim {
            1 => vec![(i as f64 + 0.5) * h],
            _ => vec![((i / self.m) as f64 + 0.5) * h, ((i % self.m) as f64 + 0.5) * h],
        }
    }

    /// Flat index into the lag table for the displacement between points.
    pub(crate) fn lag_index(&self, i: usize, j: usize) -> usize {
        match self.dim {
            1 => i.abs_diff(j),
            _ => {
                let m = self.m;
                let a = (i / m).abs_diff(j / m);
                let b = (i % m).abs_diff(j % m);
                a * (m + 1) + b
            }
        }
    }

    fn lag_count(&self) -> usize {
        (self.m + 1).pow(self.dim as u32)
    }

    fn lag_distance(&self, lag: usize) -> f64 {
        let h = self.spacing();
        match self.dim {
            1 => lag as f64 * h,
            _ => {
                let (a, b) = ((lag / (self.m + 1)) as f64, (lag % (self.m + 1)) as f64);
                h * (a * a + b * b).sqrt()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.dim) {
            return Err(Error::param("dim", format!("{} (supported: 1, 2)", self.dim)));
        }
        if self.m < 2 {
            return Err(Error::param("m", "need at least 2 cells per side"));
        }
        if !(self.extent > 0.0) || !self.extent.is_finite() {
            return Err(Error::param("extent", "must be positive"));
        }
        if !(self.dt > 0.0) || !(self.t_max >= 0.0) {
            return Err(Error::param("dt", "need dt > 0 and t_max >= 0"));
        }
        let ratio = self.t_max / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::param("t_max", format!("{} is not a multiple of dt = {}", self.t_max, self.dt)));
        }
        Ok(())
    }
}

/// One level of a trajectory handed to streaming consumers.
#[derive(Debug, Clone, Copy)]
pub struct LevelView<'a> {
    pub level: usize,
    pub t: f64,
    /// `X_{t_j}` at every grid point.
    pub values: &'a [f64],
    /// Realized `Var_j`.
    pub variance: f64,
    /// Realized `Var_j - Var_{j-1}` (zero at level 0).
    pub increment_variance: f64,
}

#[derive(Debug, Clone)]
enum Engine {
    Circulant {
        fft: GridFft,
        /// Per level: `sqrt(lambda_k / P^d)` over the embedding grid.
        sqrt_eig: Vec<Vec<f64>>,
    },
    Cholesky {
        factors: Vec<DMatrix<f64>>,
    },
}

/// Precomputed sampler for one (kernel, grid, ladder) combination.
#[derive(Debug, Clone)]
pub struct StarSampler {
    kernel: Kernel,
    grid: StarGrid,
    /// Realized covariance by lag, per level (index `j - 1`).
    lag_cov: Vec<Vec<f64>>,
    increment_var: Vec<f64>,
    variance: Vec<f64>,
    engine: Engine,
    backend: Backend,
    jitter: Vec<f64>,
    warnings: Vec<String>,
}

impl StarSampler {
    pub fn new(kernel: &Kernel, grid: StarGrid, backend: Backend) -> Result<Self> {
        grid.validate()?;
        if grid.dim != kernel.dim() {
            return Err(Error::param("dim", format!("grid d = {} but kernel d = {}", grid.dim, kernel.dim())));
        }
        let mut warnings = Vec::new();
        if grid.spacing() > (-grid.t_max).exp() {
            warnings.push(format!(
                "grid spacing {:.3e} is coarser than the finest scale e^-t = {:.3e}",
                grid.spacing(),
                (-grid.t_max).exp()
            ));
        }
        let levels = grid.levels();
        let mut lag_cov = Vec::with_capacity(levels);
        let mut worst_err = 0.0f64;
        for j in 1..=levels {
            let t0 = (j - 1) as f64 * grid.dt;
            let mut row = vec![0.0; grid.lag_count()];
            for (lag, c) in row.iter_mut().enumerate() {
                let q = increment_covariance_quad(kernel, grid.lag_distance(lag), t0, grid.dt);
                worst_err = worst_err.max(q.error);
                *c = q.value;
            }
            lag_cov.push(row);
        }
        if worst_err > COVARIANCE_TOL {
            warnings.push(format!("covariance quadrature error {worst_err:.2e} above tolerance {COVARIANCE_TOL:.0e}"));
        }
        let chosen = match backend {
            Backend::Auto if grid.points() <= AUTO_CHOLESKY_MAX_POINTS => Backend::Cholesky,
            Backend::Auto => Backend::Circulant,
            b => b,
        };
        let mut jitter = vec![0.0; levels];
        let engine = match chosen {
            Backend::Cholesky => {
                let mut factors = Vec::with_capacity(levels);
                for (j, row) in lag_cov.iter_mut().enumerate() {
                    let (l, eps) = cholesky_with_jitter(&grid, row, j + 1)?;
                    row[0] += eps;
                    jitter[j] = eps;
                    factors.push(l);
                }
                Engine::Cholesky { factors }
            }
            _ => {
                let p = 2 * grid.m;
                let fft = GridFft::new(grid.dim, p);
                let mut sqrt_eig = Vec::with_capacity(levels);
                for (j, row) in lag_cov.iter_mut().enumerate() {
                    let (s, realized) = circulant_spectrum(&grid, &fft, row, j + 1)?;
                    *row = realized;
                    sqrt_eig.push(s);
                }
                Engine::Circulant { fft, sqrt_eig }
            }
        };
        let increment_var: Vec<f64> = lag_cov.iter().map(|row| row[0]).collect();
        let mut variance = vec![0.0; levels + 1];
        for j in 1..=levels {
            variance[j] = variance[j - 1] + increment_var[j - 1];
        }
        Ok(StarSampler { kernel: kernel.clone(), grid, lag_cov, increment_var, variance, engine, backend: chosen, jitter, warnings })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn grid(&self) -> &StarGrid {
        &self.grid
    }

    pub fn levels(&self) -> usize {
        self.increment_var.len()
    }

    /// Backend actually in use (never `Auto`).
    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Diagonal jitter added per level (Cholesky only).
    pub fn jitter(&self) -> &[f64] {
        &self.jitter
    }

    /// Realized `Var_j` for `j = 0..=J`.
    pub fn variances(&self) -> &[f64] {
        &self.variance
    }

    /// Realized increment variances `sigma_j^2`, `j = 1..=J`.
    pub fn increment_variances(&self) -> &[f64] {
        &self.increment_var
    }

    /// Realized covariance of `X_{t_j}` between grid points `a` and `b`.
    pub fn covariance(&self, j: usize, a: usize, b: usize) -> f64 {
        let lag = self.grid.lag_index(a, b);
        self.lag_cov[..j].iter().map(|row| row[lag]).sum()
    }

    /// Realized covariance of the level-`j` increment (`j >= 1`) at a lag.
    pub(crate) fn increment_lag_cov(&self, j: usize) -> &[f64] {
        &self.lag_cov[j - 1]
    }

    /// Streams the levels `j = 0..=J` of the sample keyed by `key`.
    pub fn sample_with<F: FnMut(LevelView<'_>)>(&self, key: StreamKey, mut visit: F) {
        let n = self.grid.points();
        let mut x = vec![0.0; n];
        visit(LevelView { level: 0, t: 0.0, values: &x, variance: 0.0, increment_variance: 0.0 });
        let levels = self.levels();
        match &self.engine {
            Engine::Cholesky { factors } => {
                let mut g = vec![0.0; n];
                for j in 1..=levels {
                    let mut rng = key.with_level(j as u64).rng();
                    for v in g.iter_mut() {
                        *v = StandardNormal.sample(&mut rng);
                    }
                    let l = &factors[j - 1];
                    // Lower-triangular product, row by row.
                    for (r, xr) in x.iter_mut().enumerate() {
                        let mut acc = 0.0;
                        for c in 0..=r {
                            acc += l[(r, c)] * g[c];
                        }
                        *xr += acc;
                    }
                    visit(self.level_view(j, &x));
                }
            }
            Engine::Circulant { fft, sqrt_eig } => {
                let total = fft.len();
                let mut buf = vec![Complex64::new(0.0, 0.0); total];
                let mut scratch = Vec::new();
                let mut j = 1;
                while j <= levels {
                    let pair = j < levels;
                    buf.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
                    self.fill_hermitian(&mut buf, &sqrt_eig[j - 1], key.with_level(j as u64).rng(), false);
                    if pair {
                        self.fill_hermitian(&mut buf, &sqrt_eig[j], key.with_level(j as u64 + 1).rng(), true);
                    }
                    fft.process(&mut buf, &mut scratch);
                    self.add_restricted(&mut x, &buf, false);
                    visit(self.level_view(j, &x));
                    if pair {
                        self.add_restricted(&mut x, &buf, true);
                        visit(self.level_view(j + 1, &x));
                    }
                    j += 2;
                }
            }
        }
    }

    fn level_view<'a>(&self, j: usize, x: &'a [f64]) -> LevelView<'a> {
        LevelView {
            level: j,
            t: j as f64 * self.grid.dt,
            values: x,
            variance: self.variance[j],
            increment_variance: self.increment_var[j - 1],
        }
    }

    /// Adds Hermitian-symmetric Gaussian coefficients (real or imaginary slot).
    fn fill_hermitian(&self, buf: &mut [Complex64], s: &[f64], mut rng: StreamRng, imaginary: bool) {
        let p = 2 * self.grid.m;
        let dim = self.grid.dim;
        let half = std::f64::consts::FRAC_1_SQRT_2;
        for k in 0..buf.len() {
            let nk = negate_index(k, p, dim);
            if nk < k {
                continue;
            }
            let (re, im) = if nk == k {
                let g: f64 = StandardNormal.sample(&mut rng);
                (s[k] * g, 0.0)
            } else {
                let g1: f64 = StandardNormal.sample(&mut rng);
                let g2: f64 = StandardNormal.sample(&mut rng);
                (s[k] * half * g1, s[k] * half * g2)
            };
            let (a, b) = (Complex64::new(re, im), Complex64::new(re, -im));
            if imaginary {
                // i * coefficient, so its transform lands in the imaginary part.
                buf[k] += Complex64::new(-a.im, a.re);
                if nk != k {
                    buf[nk] += Complex64::new(-b.im, b.re);
                }
            } else {
                buf[k] += a;
                if nk != k {
                    buf[nk] += b;
                }
            }
        }
    }

    fn add_restricted(&self, x: &mut [f64], buf: &[Complex64], imaginary: bool) {
        let m = self.grid.m;
        let p = 2 * m;
        let pick = |c: &Complex64| if imaginary { c.im } else { c.re };
        match self.grid.dim {
            1 => {
                for (xi, c) in x.iter_mut().zip(&buf[..m]) {
                    *xi += pick(c);
                }
            }
            _ => {
                for a in 0..m {
                    for b in 0..m {
                        x[a * m + b] += pick(&buf[a * p + b]);
                    }
                }
            }
        }
    }

    /// Samples and stores every level.
    pub fn sample(&self, key: StreamKey) -> ScaleField {
        let n = self.grid.points();
        let levels = self.levels();
        let gamma_c = crate::gamma_c(self.grid.dim);
        let mut values = Vec::with_capacity(n * (levels + 1));
        let mut barrier_min = vec![0.0f64; n];
        self.sample_with(key, |lv| {
            values.extend_from_slice(lv.values);
            for (b, &x) in barrier_min.iter_mut().zip(lv.values) {
                *b = b.min(-x + gamma_c * lv.variance);
            }
        });
        ScaleField {
            grid: self.grid,
            values,
            variance: self.variance.clone(),
            barrier_min,
            gamma_c,
        }
    }
}

fn circulant_spectrum(grid: &StarGrid, fft: &GridFft, row: &[f64], level: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = grid.m;
    let p = 2 * m;
    let fold = |k: usize| if k <= m { k } else { p - k };
    let total = fft.len();
    let mut buf: Vec<Complex64> = (0..total)
        .map(|k| {
            let lag = match grid.dim {
                1 => fold(k),
                _ => fold(k / p) * (m + 1) + fold(k % p),
            };
            Complex64::new(row[lag], 0.0)
        })
        .collect();
    let mut scratch = Vec::new();
    fft.process(&mut buf, &mut scratch);
    let lmax = buf.iter().map(|c| c.re).fold(0.0f64, f64::max);
    let lmin = buf.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
    if lmin < -(1e-8 * lmax + 1e-9) {
        return Err(Error::NotPositiveSemidefinite { level, min_eigenvalue: lmin });
    }
    let norm = total as f64;
    let lambda: Vec<f64> = buf.iter().map(|c| c.re.max(0.0)).collect();
    let sqrt_eig: Vec<f64> = lambda.iter().map(|l| (l / norm).sqrt()).collect();
    // Realized covariance after clamping: inverse transform of the spectrum.
    // The spectrum is real and even, so a forward transform does the job.
    let mut back: Vec<Complex64> = lambda.iter().map(|&l| Complex64::new(l / norm, 0.0)).collect();
    fft.process(&mut back, &mut scratch);
    let mut realized = vec![0.0; row.len()];
    for (lag, r) in realized.iter_mut().enumerate() {
        let k = match grid.dim {
            1 => lag,
            _ => (lag / (m + 1)) * p + lag % (m + 1),
        };
        *r = back[k].re;
    }
    // Keep the exact diagonal when nothing was clamped.
    if lmin >= 0.0 {
        realized.copy_from_slice(row);
    }
    Ok((sqrt_eig, realized))
}

fn cholesky_with_jitter(grid: &StarGrid, row: &[f64], level: usize) -> Result<(DMatrix<f64>, f64)> {
    let n = grid.points();
    let base = DMatrix::from_fn(n, n, |a, b| row[grid.lag_index(a, b)]);
    let mut eps = 1e-12;
    while eps <= 1e-8 * (1.0 + 1e-9) {
        let mut c = base.clone();
        for i in 0..n {
            c[(i, i)] += eps;
        }
        if let Some(ch) = c.cholesky() {
            return Ok((ch.unpack(), eps));
        }
        eps *= 10.0;
    }
    let min_eigenvalue = base.symmetric_eigenvalues().min();
    Err(Error::NotPositiveSemidefinite { level, min_eigenvalue })
}

/// One-shot convenience wrapper around [`StarSampler`].
pub fn sample_star_field(kernel: &Kernel, m: usize, t_max: f64, dt: f64, key: StreamKey) -> Result<ScaleField> {
    let grid = StarGrid::unit(kernel.dim(), m, t_max, dt);
    Ok(StarSampler::new(kernel, grid, Backend::Auto)?.sample(key))
}

/// A stored multi-level ⋆-scale sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleField {
    grid: StarGrid,
    values: Vec<f64>,
    variance: Vec<f64>,
    barrier_min: Vec<f64>,
    gamma_c: f64,
}

impl ScaleField {
    pub fn grid(&self) -> &StarGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn points(&self) -> usize {
        self.grid.points()
    }

    pub fn levels(&self) -> usize {
        self.variance.len() - 1
    }

    pub fn gamma_c(&self) -> f64 {
        self.gamma_c
    }

    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.grid.dt
    }

    /// `X_{t_j}` at every grid point.
    pub fn level(&self, j: usize) -> &[f64] {
        let n = self.points();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn final_values(&self) -> &[f64] {
        self.level(self.levels())
    }

    /// Realized `Var_j`.
    pub fn variance(&self, j: usize) -> f64 {
        self.variance[j]
    }

    /// Running minimum over all levels of `-X_{t_j} + gamma_c Var_j`.
    pub fn barrier_min(&self) -> &[f64] {
        &self.barrier_min
    }

    /// Snapshot at the final level, with barrier minima attached.
    pub fn view(&self) -> FieldView<'_> {
        FieldView { barrier_min: Some(&self.barrier_min), ..self.view_at(self.levels()) }
    }

    /// Snapshot at level `j` (no barrier information).
    pub fn view_at(&self, j: usize) -> FieldView<'_> {
        FieldView {
            values: self.level(j),
            variance: self.variance[j],
            dim: self.grid.dim,
            side: self.grid.m,
            extent: self.grid.extent,
            cell_volume: self.grid.cell_volume(),
            cutoff: Cutoff::Scale { t: self.t(j) },
            gamma_c: self.gamma_c,
            barrier_min: None,
        }
    }

    /// Bridge-corrected survival weights for barrier `-beta`.
    pub fn bridge_survival(&self, beta: f64) -> Vec<f64> {
        let mut tracker = BarrierTracker::new(self.points(), beta, self.gamma_c);
        for j in 1..=self.levels() {
            tracker.update(self.level(j), self.variance[j], self.variance[j] - self.variance[j - 1]);
        }
        tracker.survival().to_vec()
    }

    /// Adds `shift[j][i]` to level `j` and recomputes barrier minima.
    pub(crate) fn add_mean(&mut self, mut shift: impl FnMut(usize, usize) -> f64) {
        let n = self.points();
        for j in 0..=self.levels() {
            for i in 0..n {
                self.values[j * n + i] += shift(j, i);
            }
        }
        self.barrier_min = vec![0.0; n];
        for j in 0..=self.levels() {
            for i in 0..n {
                let s = -self.values[j * n + i] + self.gamma_c * self.variance[j];
                self.barrier_min[i] = self.barrier_min[i].min(s);
            }
        }
    }

    /// CSV layout: a `d,M,levels` header line with its values, then one row
    /// per level (`t`, then the values in row-major order).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "d,M,levels")?;
        writeln!(w, "{},{},{}", self.grid.dim, self.grid.m, self.levels())?;
        for j in 0..=self.levels() {
            write!(w, "{:.16e}", self.t(j))?;
            for v in self.level(j) {
                write!(w, ",{v:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Flat little-endian binary: `d, M, levels` as u64, then `extent`,
    /// `dt`, the variances and the values as f64.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for v in [self.grid.dim as u64, self.grid.m as u64, self.levels() as u64] {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in [self.grid.extent, self.grid.dt].iter().chain(&self.variance).chain(&self.values) {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> std::io::Result<Self> {
        let mut word = [0u8; 8];
        let mut next_u64 = |r: &mut R| -> std::io::Result<u64> {
            r.read_exact(&mut word)?;
            Ok(u64::from_le_bytes(word))
        };
        let dim = next_u64(&mut r)? as usize;
        let m = next_u64(&mut r)? as usize;
        let levels = next_u64(&mut r)? as usize;
        if !(1..=2).contains(&dim) || m == 0 {
            return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, "bad field header"));
        }
        let read_f64 = |r: &mut R| -> std::io::Result<f64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(f64::from_le_bytes(b))
        };
        let extent = read_f64(&mut r)?;
        let dt = read_f64(&mut r)?;
        let variance = (0..=levels).map(|_| read_f64(&mut r)).collect::<std::io::Result<Vec<_>>>()?;
        let n = m.pow(dim as u32);
        let values = (0..n * (levels + 1)).map(|_| read_f64(&mut r)).collect::<std::io::Result<Vec<_>>>()?;
        let grid = StarGrid { dim, m, extent, t_max: levels as f64 * dt, dt };
        let gamma_c = crate::gamma_c(dim);
        let mut barrier_min = vec![0.0; n];
        for j in 0..=levels {
            for i in 0..n {
                barrier_min[i] = f64::min(barrier_min[i], -values[j * n + i] + gamma_c * variance[j]);
            }
        }
        Ok(ScaleField { grid, values, variance, barrier_min, gamma_c })
    }
}
