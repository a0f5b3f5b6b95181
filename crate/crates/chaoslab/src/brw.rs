//! Dyadic branching random walk.
//!
//! Every particle has `2^d` children, each displaced by an independent
//! `N(0, ln 2)` step, so generation `n` has `2^{dn}` particles and a
//! particle's lineage is encoded in its index: the parent of `i` is
//! `i >> d`. The root sits at the origin.

use crate::fields::{bridge_factor, Cutoff, FieldView};
use crate::rng::StreamKey;
use crate::{Error, Result};
use rand_distr::{Distribution, Normal};
use std::f64::consts::LN_2;
use std::io::Write;

/// Largest allowed `d * n`.
pub const MAX_DN: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct BrwState {
    dim: usize,
    generations: Vec<Vec<f64>>,
    barrier_min: Vec<f64>,
}

/// Runs the walk for `n` generations from a single particle at 0.
pub fn simulate_brw(dim: usize, n: usize, key: StreamKey) -> Result<BrwState> {
    if dim == 0 {
        return Err(Error::param("dim", "must be positive"));
    }
    if dim * n > MAX_DN {
        return Err(Error::param("n", format!("d*n = {} exceeds the particle guard {MAX_DN}", dim * n)));
    }
    let step = Normal::new(0.0, LN_2.sqrt()).expect("valid normal");
    let gamma_c = crate::gamma_c(dim);
    let kids = 1usize << dim;
    let mut generations = vec![vec![0.0]];
    let mut barrier_min = vec![0.0];
    for g in 1..=n {
        let mut rng = key.with_level(g as u64).rng();
        let parent = &generations[g - 1];
        let mut next = Vec::with_capacity(parent.len() * kids);
        let mut mins = Vec::with_capacity(parent.len() * kids);
        let drift = gamma_c * g as f64 * LN_2;
        for (i, &x) in parent.iter().enumerate() {
            for _ in 0..kids {
                let y = x + step.sample(&mut rng);
                next.push(y);
                mins.push(f64::min(barrier_min[i], -y + drift));
            }
        }
        generations.push(next);
        barrier_min = mins;
    }
    Ok(BrwState { dim, generations, barrier_min })
}

impl BrwState {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generation(&self) -> usize {
        self.generations.len() - 1
    }

    pub fn gamma_c(&self) -> f64 {
        crate::gamma_c(self.dim)
    }

    /// Positions of the current generation.
    pub fn positions(&self) -> &[f64] {
        self.generations.last().expect("root generation exists")
    }

    /// Positions at an earlier generation `m`.
    pub fn positions_at(&self, m: usize) -> &[f64] {
        &self.generations[m]
    }

    pub fn particle_count(&self) -> usize {
        self.positions().len()
    }

    /// `min_{m ≤ n} (-X_m + γ_c m ln 2)` along each particle's ancestry.
    pub fn barrier_min(&self) -> &[f64] {
        &self.barrier_min
    }

    /// Parent index of particle `i`.
    pub fn parent(&self, i: usize) -> usize {
        i >> self.dim
    }

    /// Brownian-bridge survival weight of each particle's ancestry above `-beta`.
    pub fn bridge_survival(&self, beta: f64) -> Vec<f64> {
        let gamma_c = self.gamma_c();
        let mut surv = vec![1.0];
        for g in 1..=self.generation() {
            let prev = &self.generations[g - 1];
            let cur = &self.generations[g];
            let a_prev = |i: usize| -prev[i] + gamma_c * (g - 1) as f64 * LN_2 + beta;
            surv = cur
                .iter()
                .enumerate()
                .map(|(i, &y)| {
                    let p = i >> self.dim;
                    let s = surv[p];
                    if s == 0.0 {
                        0.0
                    } else {
                        s * bridge_factor(a_prev(p), -y + gamma_c * g as f64 * LN_2 + beta, LN_2)
                    }
                })
                .collect();
        }
        surv
    }

    /// Edge list `generation,index,parent,position`, root first.
    pub fn write_edges_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "generation,index,parent,position")?;
        writeln!(w, "0,0,,{:.16e}", self.generations[0][0])?;
        for (g, gen) in self.generations.iter().enumerate().skip(1) {
            for (i, x) in gen.iter().enumerate() {
                writeln!(w, "{g},{i},{},{x:.16e}", i >> self.dim)?;
            }
        }
        Ok(())
    }
}

/// `2^d E[e^{γW}] e^{-(γ²/2 + d) ln 2}` for `W ~ N(0, ln 2)`; equals one.
pub fn normalization_factor(gamma: f64, dim: usize) -> f64 {
    let d = dim as f64;
    (d * LN_2).exp() * (0.5 * gamma * gamma * LN_2).exp() * (-(0.5 * gamma * gamma + d) * LN_2).exp()
}

/// `M_n^γ = Σ_i exp(γ X_n(i) - (γ²/2 + d) n ln 2)`.
pub fn additive_martingale(state: &BrwState, gamma: f64) -> f64 {
    let c = (0.5 * gamma * gamma + state.dim as f64) * state.generation() as f64 * LN_2;
    state.positions().iter().map(|&x| (gamma * x - c).exp()).sum()
}

fn derivative_terms(state: &BrwState, beta: f64) -> impl Iterator<Item = f64> + '_ {
    let n = state.generation() as f64;
    let gc = state.gamma_c();
    let c = (0.5 * gc * gc + state.dim as f64) * n * LN_2;
    state.positions().iter().map(move |&x| (-x + gc * n * LN_2 + beta) * (gc * x - c).exp())
}

/// `D_n^β` with the barrier checked at integer generations.
pub fn derivative_martingale(state: &BrwState, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(derivative_terms(state, beta).zip(state.barrier_min()).filter(|(_, &m)| m >= -beta).map(|(v, _)| v).sum())
}

/// `D_n^β` with each term weighted by its ancestry's bridge survival
/// probability; an exact martingale in `n`.
pub fn derivative_martingale_bridged(state: &BrwState, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let surv = state.bridge_survival(beta);
    Ok(derivative_terms(state, beta).zip(surv).map(|(v, s)| if s > 0.0 { v * s } else { 0.0 }).sum())
}

/// Derivative martingale without barrier (signed).
pub fn derivative_martingale_plain(state: &BrwState) -> f64 {
    derivative_terms(state, 0.0).sum()
}

/// `sqrt(n) M_n^{γ_c}`.
pub fn seneta_heyde_brw(state: &BrwState) -> Result<f64> {
    let n = state.generation();
    if n == 0 {
        return Err(Error::param("n", "Seneta–Heyde normalization needs n >= 1"));
    }
    Ok((n as f64).sqrt() * additive_martingale(state, state.gamma_c()))
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) {
        return Err(Error::param("beta", format!("{beta} must be nonnegative")));
    }
    Ok(())
}

/// Per-generation values `(n, M_n^γ, D_n^β)` along one realization.
pub fn martingale_trajectory(state: &BrwState, gamma: f64, beta: f64) -> Result<Vec<(usize, f64, f64)>> {
    check_beta(beta)?;
    let gc = state.gamma_c();
    let d = state.dim as f64;
    let mut mins = vec![0.0f64];
    let mut out = Vec::with_capacity(state.generation() + 1);
    for (g, gen) in state.generations.iter().enumerate() {
        let gf = g as f64;
        if g > 0 {
            mins = gen.iter().enumerate().map(|(i, &y)| mins[i >> state.dim].min(-y + gc * gf * LN_2)).collect();
        }
        let cm = (0.5 * gamma * gamma + d) * gf * LN_2;
        let cd = (0.5 * gc * gc + d) * gf * LN_2;
        let m: f64 = gen.iter().map(|&x| (gamma * x - cm).exp()).sum();
        let dv: f64 = gen
            .iter()
            .zip(&mins)
            .filter(|(_, &b)| b >= -beta)
            .map(|(&x, _)| (-x + gc * gf * LN_2 + beta) * (gc * x - cd).exp())
            .sum();
        out.push((g, m, dv));
    }
    Ok(out)
}

/// Dyadic coordinates of particle `i` at generation `n`.
pub fn cell_of(i: usize, n: usize, dim: usize) -> Vec<usize> {
    let mask = (1usize << dim) - 1;
    let mut coords = vec![0usize; dim];
    for level in 0..n {
        let digit = (i >> (dim * (n - 1 - level))) & mask;
        for (k, c) in coords.iter_mut().enumerate() {
            *c = (*c << 1) | ((digit >> k) & 1);
        }
    }
    coords
}

/// Generation of the last common ancestor of particles `i` and `j`.
pub fn branch_generation(mut i: usize, mut j: usize, n: usize, dim: usize) -> usize {
    let mut up = 0;
    while i != j {
        i >>= dim;
        j >>= dim;
        up += 1;
    }
    n - up
}

/// The piecewise-constant field `Y_n` on `[0,1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicField {
    pub dim: usize,
    pub generation: usize,
    /// Row-major values on the `2^n`-per-side grid.
    pub values: Vec<f64>,
}

impl DyadicField {
    pub fn side(&self) -> usize {
        1 << self.generation
    }

    pub fn variance(&self) -> f64 {
        self.generation as f64 * LN_2
    }

    pub fn view(&self) -> FieldView<'_> {
        FieldView::on_unit_cube(&self.values, self.dim, self.variance(), Cutoff::Scale { t: self.variance() })
    }

    /// `∫ exp(γ Y_n - γ² n ln2 / 2) dx`.
    pub fn chaos_integral(&self, gamma: f64) -> f64 {
        let vol = (self.side() as f64).powi(-(self.dim as i32));
        let v = self.variance();
        self.values.iter().map(|&y| (gamma * y - 0.5 * gamma * gamma * v).exp() * vol).sum()
    }
}

pub fn brw_to_field(state: &BrwState) -> Result<DyadicField> {
    if state.dim > 2 {
        return Err(Error::param("dim", "fields are laid out for d <= 2"));
    }
    let n = state.generation();
    let side = 1usize << n;
    let mut values = vec![0.0; state.particle_count()];
    for (i, &x) in state.positions().iter().enumerate() {
        let c = cell_of(i, n, state.dim);
        let idx = if state.dim == 1 { c[0] } else { c[0] * side + c[1] };
        values[idx] = x;
    }
    Ok(DyadicField { dim: state.dim, generation: n, values })
}
