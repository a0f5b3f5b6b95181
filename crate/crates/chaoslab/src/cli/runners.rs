//! One runner per experiment kind. Each returns its checks, warnings and a
//! JSON summary; raw samples go to `samples_*.csv` in the output directory.

use super::config::{ExperimentConfig, Kind};
use super::output::{run_table, write_table, Basis, Check, TableSpec};
use crate::brw::{additive_martingale, derivative_martingale_bridged, derivative_martingale_plain, seneta_heyde_brw, simulate_brw};
use crate::fields::{make_kernel, sample_circle_gff, Cutoff, FieldView, Kernel, KernelSpec, StarGrid, StarSampler};
use crate::measures::{derivative_measure, derivative_total, subcritical_measure, subcritical_total};
use crate::rng::{StreamKey, Tag};
use crate::spine::{bessel_spine_check, importance_identity_check, sample_rooted_field, spine_trajectory, Functional};
use crate::stats::{
    extremes_from_samples, fit_line, gumbel_test, kahane_compare, martingale_check, mean_and_se, ratio_summary, sh_ratio, star_equation_check,
    tail_estimate, BoxMoments, Exponent,
};
use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::json;
use std::path::Path;

pub struct Outcome {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub summary: serde_json::Value,
    pub outputs: Vec<String>,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    dir: &'a Path,
    resume: bool,
}

impl Ctx<'_> {
    fn table<F>(&self, spec: &TableSpec, replicas: usize, f: F) -> Result<Vec<Vec<f64>>>
    where
        F: Fn(usize) -> Result<Vec<Vec<f64>>> + Sync,
    {
        run_table(self.dir, spec, replicas, self.cfg.batch, self.resume, f)
    }

    fn key(&self, tag: Tag, i: usize) -> StreamKey {
        StreamKey::new(self.cfg.seed, tag, i as u64)
    }
}

fn kernel_of(cfg: &ExperimentConfig) -> Result<Kernel> {
    let spec = match cfg.kernel {
        crate::fields::KernelFamily::Wendland => KernelSpec::wendland(cfg.dim),
        crate::fields::KernelFamily::Triangular1d => KernelSpec::triangular(),
        crate::fields::KernelFamily::UserTabulated => KernelSpec::tabulated(cfg.dim, cfg.kernel_table.clone()),
    };
    make_kernel(spec)
}

fn sampler_of(cfg: &ExperimentConfig) -> Result<StarSampler> {
    StarSampler::new(&kernel_of(cfg)?, StarGrid::unit(cfg.dim, cfg.m, cfg.t_max, cfg.dt), cfg.backend)
}

pub fn run_kind(cfg: &ExperimentConfig, dir: &Path, resume: bool) -> Result<Outcome> {
    let ctx = Ctx { cfg, dir, resume };
    let (checks, warnings, summary, tables) = match cfg.kind()? {
        Kind::Sample => sample(&ctx)?,
        Kind::Moments => moments(&ctx)?,
        Kind::Tail => tail(&ctx)?,
        Kind::Gumbel => gumbel(&ctx)?,
        Kind::ShRatio => sh(&ctx)?,
        Kind::Factor2 => factor2(&ctx)?,
        Kind::Extremes => extremes(&ctx)?,
        Kind::Brw => brw(&ctx)?,
        Kind::Spine => spine(&ctx)?,
        Kind::Kahane => kahane(&ctx)?,
        Kind::StarEq => star_eq(&ctx)?,
    };
    let outputs = tables.iter().map(|t| format!("samples_{t}.csv")).collect();
    Ok(Outcome { checks, warnings, summary, outputs })
}

type Parts = (Vec<Check>, Vec<String>, serde_json::Value, Vec<&'static str>);

fn sample(ctx: &Ctx) -> Result<Parts> {
    let cfg = ctx.cfg;
    let s = sampler_of(cfg)?;
    let grid = *s.grid();
    let mut header = vec!["replica", "index", "x"];
    if cfg.dim == 2 {
        header.push("y");
    }
    header.push("value");
    let mut spec = TableSpec::new("field", &header);
    spec.int_cols = 2;
    spec.rows_per_replica = grid.points();
    ctx.table(&spec, cfg.replicas, |r| {
        let f = s.sample(ctx.key(Tag::StarField, r));
        Ok(f.final_values()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let mut row = vec![r as f64, i as f64];
                row.extend(grid.coordinates(i));
                row.push(v);
                row
            })
            .collect())
    })?;
    let var = s.variances()[s.levels()];
    let checks = vec![
        Check::flag("kernel-invariants", s.kernel().report().passed(), Basis::ExactIdentity),
        Check::at_most("grid-spacing-vs-finest-scale", grid.spacing(), (-cfg.t_max).exp(), Basis::HarnessChoice),
        Check::new("final-variance", var, cfg.t_max, 1e-6 * cfg.t_max.max(1.0), super::output::Comparison::Absolute, Basis::ExactIdentity),
    ];
    let summary = json!({
        "grid": grid,
        "backend": s.backend(),
        "kernel": s.kernel().report(),
        "variances": s.variances(),
    });
    Ok((checks, s.warnings().to_vec(), summary, vec!["field"]))
}

/// A decade of radii inside the resolved range, unless configured.
fn radii_of(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    if !cfg.radii.is_empty() {
        return Ok(cfg.radii.clone());
    }
    let hi = 0.25;
    let lo = (8.0 * (-cfg.t_max).exp()).max(hi / 10.0);
    if lo >= hi / 2.0 {
        return Err(Error::Unresolved(format!("cutoff t = {} leaves no usable range of box radii", cfg.t_max)));
    }
    Ok((0..5).map(|k| lo * (hi / lo).powf(k as f64 / 4.0)).collect())
}

fn moments(ctx: &Ctx) -> Result<Parts> {
    let cfg = ctx.cfg;
    let s = sampler_of(cfg)?;
    let radii = radii_of(cfg)?;
    let gc = crate::gamma_c(cfg.dim);
    let gammas: Vec<f64> = cfg.gamma.iter().copied().filter(|&g| g < gc).collect();
    // (label, exponent) per column group.
    let mut groups: Vec<(String, Exponent)> = Vec::new();
    for &q in &cfg.q {
        groups.push((format!("derivative_q{q}"), Exponent::Critical { dim: cfg.dim, q }));
    }
    for &g in &gammas {
        for &q in &cfg.q {
            groups.push((format!("subcritical{g}_q{q}"), Exponent::Subcritical { dim: cfg.dim, gamma: g, q }));
        }
    }
    let mut header = vec!["replica".to_string()];
    for (label, _) in &groups {
        for k in 0..radii.len() {
            header.push(format!("{label}_r{k}"));
        }
    }
    let spec = TableSpec { name: "moments".into(), header, int_cols: 1, rows_per_replica: 1 };
    let rows = ctx.table(&spec, cfg.replicas, |r| {
        let f = s.sample(ctx.key(Tag::StarField, r));
        let view = f.view();
        let der = derivative_measure(&view);
        let subs: Vec<_> = gammas.iter().map(|&g| subcritical_measure(&view, g)).collect::<Result<_>>()?;
        let mut row = vec![r as f64];
        for &q in &cfg.q {
            let mut acc = BoxMoments::new(q, &radii, cfg.t_max)?;
            acc.add(&der)?;
            row.extend(acc.moments());
        }
        for m in &subs {
            for &q in &cfg.q {
                let mut acc = BoxMoments::new(q, &radii, cfg.t_max)?;
                acc.add(m)?;
                row.extend(acc.moments());
            }
        }
        Ok(vec![row])
    })?;
    let x: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let mut checks = Vec::new();
    let mut fits = Vec::new();
    for (gi, (label, exponent)) in groups.iter().enumerate() {
        let y: Vec<f64> = (0..radii.len())
            .map(|k| (rows.iter().map(|row| row[1 + gi * radii.len() + k]).sum::<f64>() / rows.len() as f64).ln())
            .collect();
        let mut fit = fit_line(&x, &y)?;
        fit.target = Some(exponent.value());
        checks.push(Check::relative(format!("{label}-exponent"), fit.slope, exponent.value(), 0.10, Basis::AsymptoticLaw));
        fits.push(json!({"label": label, "exponent": exponent, "fit": fit}));
    }
    Ok((checks, s.warnings().to_vec(), json!({"radii": radii, "fits": fits}), vec!["moments"]))
}

fn derivative_masses(ctx: &Ctx, s: &StarSampler) -> Result<Vec<f64>> {
    let spec = TableSpec::new("mass", &["replica", "derivative_mass"]);
    let rows = ctx.table(&spec, ctx.cfg.replicas, |r| {
        let f = s.sample(ctx.key(Tag::StarField, r));
        Ok(vec![vec![r as f64, derivative_total(&f.view())]])
    })?;
    Ok(rows.iter().map(|r| r[1]).collect())
}

fn tail(ctx: &Ctx) -> Result<Parts> {
    let cfg = ctx.cfg;
    let s = sampler_of(cfg)?;
    let masses = derivative_masses(ctx, &s)?;
    let thresholds = if cfg.thresholds.is_empty() { (0..=18).map(|k| 10f64.powf(k as f64 / 6.0)).collect() } else { cfg.thresholds.clone() };
    let rep = tail_estimate(&masses, &thresholds, 1.0, cfg.dim)?;
    let checks = vec![Check::at_least("plateau-run", rep.plateau_run as f64, 3.0, Basis::AsymptoticLaw)];
    Ok((checks, s.warnings().to_vec(), serde_json::to_value(&rep)?, vec!["mass"]))
}

fn gumbel(ctx: &Ctx) -> Result<Parts> {
    let cfg = ctx.cfg;
    let spec = TableSpec::new("mass", &["replica", "derivative_mass"]);
    let rows = ctx.table(&spec, cfg.replicas, |r| {
        let f = sample_circle_gff(cfg.modes, cfg.m, true, ctx.key(Tag::Circle, r))?;
        Ok(vec![vec![r as f64, derivative_total(&f.view())]])
    })?;
    let masses: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let rep = gumbel_test(&masses)?;
    let checks = vec![
        Check::at_most("ks-distance", rep.ks_distance, 0.05, Basis::AsymptoticLaw),
        Check::relative("median-scaled-mass", rep.median_scaled_mass, rep.median_target, 0.10, Basis::AsymptoticLaw),
    ];
    Ok((checks, Vec::new(), serde_json::to_value(&rep)?, vec!["mass"]))
}

fn sh(ctx: &Ctx) -> Result<Parts> {
    let cfg = ctx.cfg;
    let s = sampler_of(cfg)?;
    let gc = crate::gamma_c(cfg.dim);
    let spec = TableSpec::new("ratio", &["replica", "seneta_heyde", "derivative"]);
    let rows = ctx.table(&spec, cfg.replicas, |r| {
        let f = s.sample(ctx.key(Tag::StarField, r));
        let v = f.view();
        Ok(vec![vec![r as f64, cfg.t_max.sqrt() * subcritical_total(&v, gc), derivative_total(&v)]])
    })?;
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r[1], r[2])).collect();
    let rep = sh_ratio(&pairs)?;
    let checks = vec![Check::relative("median-ratio", rep.median.estimate, rep.target, 0.15, Basis::AsymptoticLaw)];
    Ok((checks, s.warnings().to_vec(), serde_json::to_value(&rep)?, vec!["ratio"]))
}

fn factor2(ctx: &Ctx) -> Result<Parts> {
    let cfg = ctx.cfg;
    let s = sampler_of(cfg)?;
    let gc = crate::gamma_c(cfg.dim);
    let mut gammas = cfg.gamma.clone();
    gammas.sort_by(f64::total_cmp);
    let mut header = vec!["replica".to_string(), "derivative".to_string()];
    header.extend(gammas.iter().map(|g| format!("rescaled{g}")));
    let spec = TableSpec { name: "factor2".into(), header, int_cols: 1, rows_per_replica: 1 };
    let rows = ctx.table(&spec, cfg.replicas, |r| {
        let f = s.sample(ctx.key(Tag::StarField, r));
        let v = f.view();
        let mut row = vec![r as f64, derivative_total(&v)];
        row.extend(gammas.iter().map(|&g| subcritical_total(&v, g) / (gc - g)));
        Ok(vec![row])
    })?;
    let reports: Vec<_> = (0..gammas.len())
        .map(|k| ratio_summary(&rows.iter().map(|r| (r[2 + k], r[1])).collect::<Vec<_>>(), 2.0))
        .collect::<Result<_>>()?;
    // Means decide; medians are reported alongside in the summary.
    let means: Vec<f64> = reports.iter().map(|r| r.mean.estimate).collect();
    let increasing = means.windows(2).all(|w| w[1] > w[0]);
    let last = *means.last().expect("non-empty gamma list");
    let checks = vec![
        Check::flag("mean-increasing-in-gamma", increasing, Basis::AsymptoticLaw),
        Check::new("last-mean-band", last, 2.0, 0.6, super::output::Comparison::Absolute, Basis::HarnessChoice),
    ];
    let summary = json!({"gammas": gammas, "ratios": reports});
    Ok((checks, s.warnings().to_vec(), summary, vec!["factor2"]))
}

fn extremes(ctx: &Ctx) -> Result<Parts> {
    let cfg = ctx.cfg;
    let s = sampler_of(cfg)?;
    let grid = *s.grid();
    if grid.spacing() > 2.0 * (-cfg.t_max).exp() {
        return Err(Error::Unresolved(format!("grid spacing {:.3e} too coarse for the maximum at t = {}", grid.spacing(), cfg.t_max)));
    }
    let ladder = if cfg.ladder.is_empty() { vec![cfg.t_max] } else { cfg.ladder.clone() };
    let levels: Vec<usize> = ladder
        .iter()
        .map(|&t| {
            let j = (t / cfg.dt).round() as usize;
            if (j as f64 * cfg.dt - t).abs() > 1e-9 {
                Err(Error::Config { field: "ladder".into(), reason: format!("{t} is not a multiple of dt") })
            } else {
                Ok(j)
            }
        })
        .collect::<Result<_>>()?;
    let last = *levels.iter().max().expect("non-empty ladder");
    let mut header = vec!["replica".to_string()];
    header.extend(ladder.iter().map(|t| format!("max_t{t}")));
    header.push("derivative".into());
    let spec = TableSpec { name: "maxima".into(), header, int_cols: 1, rows_per_replica: 1 };
    let rows = ctx.table(&spec, cfg.replicas, |r| {
        let mut row = vec![r as f64];
        row.resize(1 + levels.len(), f64::NAN);
        let mut w = 0.0;
        s.sample_with(ctx.key(Tag::StarField, r), |lv| {
            for (k, &j) in levels.iter().enumerate() {
                if lv.level == j {
                    row[1 + k] = lv.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                }
            }
            if lv.level == last {
                w = derivative_total(&FieldView::on_unit_cube(lv.values, grid.dim, lv.variance, Cutoff::Scale { t: lv.t }));
            }
        });
        row.push(w);
        Ok(vec![row])
    })?;
    let maxima: Vec<Vec<f64>> = (0..ladder.len()).map(|k| rows.iter().map(|r| r[1 + k]).collect()).collect();
    let der: Vec<f64> = rows.iter().map(|r| r[1 + ladder.len()]).collect();
    let rep = extremes_from_samples(cfg.dim, &ladder, &maxima, &der)?;
    let mut checks = Vec::new();
    if ladder.len() >= 2 {
        checks.push(Check::at_most("iqr-max-relative-deviation", rep.max_relative_deviation, crate::stats::IQR_BAND, Basis::AsymptoticLaw));
    }
    Ok((checks, s.warnings().to_vec(), serde_json::to_value(&rep)?, vec!["maxima"]))
}

fn brw(ctx: &Ctx) -> Result<Parts> {
    let cfg = ctx.cfg;
    let n = cfg.generations;
    let mut header = vec!["replica".to_string()];
    header.extend(cfg.gamma.iter().map(|g| format!("additive{g}")));
    header.extend(["derivative_barrier_bridged".into(), "seneta_heyde".into(), "derivative".into()]);
    let spec = TableSpec { name: "brw".into(), header, int_cols: 1, rows_per_replica: 1 };
    let rows = ctx.table(&spec, cfg.replicas, |r| {
        let st = simulate_brw(cfg.dim, n, ctx.key(Tag::Brw, r))?;
        let mut row = vec![r as f64];
        row.extend(cfg.gamma.iter().map(|&g| additive_martingale(&st, g)));
        row.push(derivative_martingale_bridged(&st, cfg.beta)?);
        row.push(seneta_heyde_brw(&st)?);
        row.push(derivative_martingale_plain(&st));
        Ok(vec![row])
    })?;
    let k = cfg.gamma.len();
    let mut checks = Vec::new();
    let mut mart = Vec::new();
    for (gi, g) in cfg.gamma.iter().enumerate() {
        let rep = martingale_check(&rows.iter().map(|r| (1.0, r[1 + gi])).collect::<Vec<_>>());
        checks.push(Check::z_score(format!("additive{g}-mean-one"), rep.z, Basis::ExactIdentity));
        mart.push(json!({"gamma": g, "report": rep}));
    }
    let drep = martingale_check(&rows.iter().map(|r| (cfg.beta, r[1 + k])).collect::<Vec<_>>());
    checks.push(Check::z_score("barrier-derivative-mean-beta", drep.z, Basis::ExactIdentity));
    let sh = sh_ratio(&rows.iter().map(|r| (r[2 + k], r[3 + k])).collect::<Vec<_>>())?;
    checks.push(Check::relative("seneta-heyde-median-ratio", sh.median.estimate, sh.target, 0.15, Basis::AsymptoticLaw));
    let summary = json!({"generations": n, "additive": mart, "barrier_derivative": drep, "seneta_heyde": sh});
    Ok((checks, Vec::new(), summary, vec!["brw"]))
}

fn spine(ctx: &Ctx) -> Result<Parts> {
    let cfg = ctx.cfg;
    let s = sampler_of(cfg)?;
    let gamma = cfg.gamma[0];
    let mut header = vec!["replica".to_string(), "root".to_string()];
    header.extend((0..=s.levels()).map(|j| format!("centred_t{}", j as f64 * cfg.dt)));
    let spec = TableSpec { name: "spine".into(), header, int_cols: 2, rows_per_replica: 1 };
    let rows = ctx.table(&spec, cfg.replicas, |r| {
        let rs = sample_rooted_field(&s, gamma, ctx.key(Tag::Root, r))?;
        let mut row = vec![r as f64, rs.root as f64];
        row.extend(spine_trajectory(&rs).into_iter().map(|p| p.1));
        Ok(vec![row])
    })?;
    let finals: Vec<f64> = rows.iter().map(|r| r[r.len() - 1]).collect();
    let (m, se) = mean_and_se(&finals);
    let mut checks = vec![Check::z_score("spine-centred-mean", if se > 0.0 { m / se } else { 0.0 }, Basis::ExactIdentity)];
    let mut battery = Vec::new();
    for (k, f) in Functional::BATTERY.iter().enumerate() {
        let c = importance_identity_check(&s, *f, gamma, cfg.replicas, cfg.seed.wrapping_add(k as u64))?;
        checks.push(Check::z_score(format!("importance-{}", f.name()), c.z, Basis::ExactIdentity));
        battery.push(c);
    }
    let b = bessel_spine_check(cfg.beta, cfg.t_max, cfg.dt, cfg.bessel_replicas, ctx.key(Tag::Spine, 0))?;
    checks.push(Check::z_score("bessel-second-moment", b.z, Basis::ClosedForm));
    checks.push(Check::at_most("bessel-ks-distance", b.ks.distance, 0.05, Basis::HarnessChoice));
    let mut warnings = s.warnings().to_vec();
    warnings.extend(b.warning.clone());
    Ok((checks, warnings, json!({"importance": battery, "bessel": b}), vec!["spine"]))
}

fn kahane(ctx: &Ctx) -> Result<Parts> {
    let cfg = ctx.cfg;
    let s = sampler_of(cfg)?;
    let gamma = cfg.gamma[0];
    let c = cfg.shift;
    let spec = TableSpec::new("kahane", &["replica", "mass_a", "mass_b", "mass_a_independent"]);
    let rows = ctx.table(&spec, cfg.replicas, |r| {
        let a = subcritical_total(&s.sample(ctx.key(Tag::Kahane, 2 * r)).view(), gamma);
        let a2 = subcritical_total(&s.sample(ctx.key(Tag::Kahane, 2 * r + 1)).view(), gamma);
        // B = X + sqrt(c) Z: covariance raised by c everywhere.
        let z: f64 = ctx.key(Tag::Shift, r).rng().sample(StandardNormal);
        let b = subcritical_total(&s.sample(ctx.key(Tag::Aux, r)).view(), gamma) * (gamma * c.sqrt() * z - 0.5 * gamma * gamma * c).exp();
        Ok(vec![vec![r as f64, a, b, a2]])
    })?;
    let j = s.levels();
    let n = s.grid().points();
    let cov_a = |x: usize, y: usize| s.covariance(j, x, y);
    let cov_b = |x: usize, y: usize| s.covariance(j, x, y) + c;
    let square = |x: f64| x * x;
    let shifted = kahane_compare(n, &cov_a, &cov_b, |i| Ok(rows[i][1]), |i| Ok(rows[i][2]), square, cfg.replicas)?;
    let same = kahane_compare(n, &cov_a, &cov_a, |i| Ok(rows[i][1]), |i| Ok(rows[i][3]), square, cfg.replicas)?;
    let checks = vec![
        Check::flag("constant-shift-not-rejected", !shifted.rejected, Basis::ExactIdentity),
        Check::flag("identical-samplers-not-rejected", !same.rejected, Basis::HarnessChoice),
    ];
    Ok((checks, s.warnings().to_vec(), json!({"shift": c, "gamma": gamma, "constant_shift": shifted, "identical": same}), vec!["kahane"]))
}

fn star_eq(ctx: &Ctx) -> Result<Parts> {
    let cfg = ctx.cfg;
    let kernel = kernel_of(cfg)?;
    let rep = star_equation_check(&kernel, cfg.gamma[0], cfg.t_split, cfg.t_max, cfg.m, cfg.dt, cfg.replicas, cfg.seed)?;
    let rows: Vec<Vec<f64>> = rep.lhs.iter().zip(&rep.rhs).enumerate().map(|(i, (a, b))| vec![i as f64, *a, *b]).collect();
    write_table(ctx.dir, &TableSpec::new("star_eq", &["replica", "lhs", "rhs"]), &rows)?;
    let checks = vec![Check::at_most("ks-distance", rep.ks.distance, 0.08, Basis::HarnessChoice)];
    Ok((checks, Vec::new(), json!({"gamma": rep.gamma, "t": rep.t, "big_t": rep.big_t, "ks": rep.ks}), vec!["star_eq"]))
}
