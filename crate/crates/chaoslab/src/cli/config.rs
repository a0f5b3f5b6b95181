//! Experiment configuration.
//!
//! The text format is one `key = value` per line, `#` starts a comment and
//! lists are comma separated. A file whose first non-blank character is `{`
//! is read as JSON with the same keys. Unknown keys are rejected.

use crate::fields::{Backend, KernelFamily};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Sample,
    Moments,
    Tail,
    Gumbel,
    ShRatio,
    Factor2,
    Extremes,
    Brw,
    Spine,
    Kahane,
    StarEq,
}

impl Kind {
    pub const ALL: [Kind; 11] = [
        Kind::Sample,
        Kind::Moments,
        Kind::Tail,
        Kind::Gumbel,
        Kind::ShRatio,
        Kind::Factor2,
        Kind::Extremes,
        Kind::Brw,
        Kind::Spine,
        Kind::Kahane,
        Kind::StarEq,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Sample => "sample",
            Kind::Moments => "moments",
            Kind::Tail => "tail",
            Kind::Gumbel => "gumbel",
            Kind::ShRatio => "sh-ratio",
            Kind::Factor2 => "factor2",
            Kind::Extremes => "extremes",
            Kind::Brw => "brw",
            Kind::Spine => "spine",
            Kind::Kahane => "kahane",
            Kind::StarEq => "star-eq",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config { field: "kind".into(), reason: format!("unknown experiment kind `{s}`") })
    }
}

/// Every knob of an experiment run. Fields not used by a kind are ignored
/// by its runner but still validated and hashed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<Kind>,
    pub dim: usize,
    pub kernel: KernelFamily,
    /// Samples of the seed kernel on a uniform grid of `[0, 1]`.
    pub kernel_table: Vec<f64>,
    pub backend: Backend,
    /// Grid cells per side.
    pub m: usize,
    pub t_max: f64,
    pub dt: f64,
    /// Fourier modes of the circle field.
    pub modes: usize,
    /// Branching random walk depth.
    pub generations: usize,
    pub gamma: Vec<f64>,
    pub beta: f64,
    pub q: Vec<f64>,
    /// Box radii for moment scaling; empty picks a decade inside the
    /// resolved range.
    pub radii: Vec<f64>,
    /// Tail thresholds; empty picks a geometric ladder.
    pub thresholds: Vec<f64>,
    /// Cutoffs at which maxima are recorded; empty means `[t_max]`.
    pub ladder: Vec<f64>,
    /// Outer cutoff of the ⋆-equation (the total cutoff is `t_max`).
    pub t_split: f64,
    /// Constant added to the covariance in the Kahane comparison.
    pub shift: f64,
    pub replicas: usize,
    /// Spine-only samples for the Bessel comparison.
    pub bessel_replicas: usize,
    pub seed: u64,
    pub workers: usize,
    /// Replicas per flushed batch of CSV rows.
    pub batch: usize,
    pub out: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: None,
            dim: 1,
            kernel: KernelFamily::Wendland,
            kernel_table: Vec::new(),
            backend: Backend::Auto,
            m: 1024,
            t_max: 4.0,
            dt: 0.25,
            modes: 1024,
            generations: 12,
            gamma: vec![1.0],
            beta: 1.0,
            q: vec![0.3, 0.5],
            radii: Vec::new(),
            thresholds: Vec::new(),
            ladder: Vec::new(),
            t_split: 1.0,
            shift: 0.5,
            replicas: 100,
            bessel_replicas: 40_000,
            seed: 0,
            workers: 1,
            batch: 256,
            out: "out".into(),
        }
    }
}

enum Shape {
    Int,
    Float,
    List,
    Text,
}

const SCHEMA: [(&str, Shape); 24] = [
    ("kind", Shape::Text),
    ("dim", Shape::Int),
    ("kernel", Shape::Text),
    ("kernel_table", Shape::List),
    ("backend", Shape::Text),
    ("m", Shape::Int),
    ("t_max", Shape::Float),
    ("dt", Shape::Float),
    ("modes", Shape::Int),
    ("generations", Shape::Int),
    ("gamma", Shape::List),
    ("beta", Shape::Float),
    ("q", Shape::List),
    ("radii", Shape::List),
    ("thresholds", Shape::List),
    ("ladder", Shape::List),
    ("t_split", Shape::Float),
    ("shift", Shape::Float),
    ("replicas", Shape::Int),
    ("bessel_replicas", Shape::Int),
    ("seed", Shape::Int),
    ("workers", Shape::Int),
    ("batch", Shape::Int),
    ("out", Shape::Text),
];

/// Keys that do not change the sampled numbers and are left out of the hash.
const UNHASHED: [&str; 3] = ["workers", "batch", "out"];

fn cfg_err(field: &str, reason: impl Into<String>) -> Error {
    Error::Config { field: field.into(), reason: reason.into() }
}

fn parse_float(field: &str, s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| cfg_err(field, format!("`{}` is not a number", s.trim())))
}

impl ExperimentConfig {
    /// Parses either format.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(text).map_err(|e| cfg_err("json", e.to_string()));
        }
        let mut map = serde_json::Map::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| cfg_err(&format!("line {}", n + 1), "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let shape = &SCHEMA.iter().find(|(k, _)| *k == key).ok_or_else(|| cfg_err(key, "unknown key"))?.1;
            let json = match shape {
                Shape::Int => serde_json::Value::from(value.parse::<u64>().map_err(|_| cfg_err(key, format!("`{value}` is not a non-negative integer")))?),
                Shape::Float => serde_json::Value::from(parse_float(key, value)?),
                Shape::List if value.is_empty() => serde_json::Value::Array(Vec::new()),
                Shape::List => value.split(',').map(|v| parse_float(key, v).map(serde_json::Value::from)).collect::<Result<_>>()?,
                Shape::Text => serde_json::Value::from(value),
            };
            if map.insert(key.to_string(), json).is_some() {
                return Err(cfg_err(key, "given twice"));
            }
        }
        serde_json::from_value(serde_json::Value::Object(map.clone())).map_err(|e| {
            // Re-check key by key so the diagnostic names the offending field.
            let field = map
                .iter()
                .find(|(k, v)| {
                    let one = serde_json::Map::from_iter([((*k).clone(), (*v).clone())]);
                    serde_json::from_value::<ExperimentConfig>(serde_json::Value::Object(one)).is_err()
                })
                .map_or("config".to_string(), |(k, _)| k.clone());
            cfg_err(&field, e.to_string())
        })
    }

    /// Canonical text form; [`ExperimentConfig::parse`] inverts it exactly.
    pub fn to_text(&self) -> String {
        fn list(v: &[f64]) -> String {
            v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
        }
        let kernel = serde_json::to_value(self.kernel).expect("enum serializes");
        let backend = serde_json::to_value(self.backend).expect("enum serializes");
        let mut s = String::new();
        if let Some(k) = self.kind {
            s += &format!("kind = {k}\n");
        }
        s += &format!("dim = {}\n", self.dim);
        s += &format!("kernel = {}\n", kernel.as_str().unwrap_or_default());
        s += &format!("kernel_table = {}\n", list(&self.kernel_table));
        s += &format!("backend = {}\n", backend.as_str().unwrap_or_default());
        s += &format!("m = {}\n", self.m);
        s += &format!("t_max = {:?}\n", self.t_max);
        s += &format!("dt = {:?}\n", self.dt);
        s += &format!("modes = {}\n", self.modes);
        s += &format!("generations = {}\n", self.generations);
        s += &format!("gamma = {}\n", list(&self.gamma));
        s += &format!("beta = {:?}\n", self.beta);
        s += &format!("q = {}\n", list(&self.q));
        s += &format!("radii = {}\n", list(&self.radii));
        s += &format!("thresholds = {}\n", list(&self.thresholds));
        s += &format!("ladder = {}\n", list(&self.ladder));
        s += &format!("t_split = {:?}\n", self.t_split);
        s += &format!("shift = {:?}\n", self.shift);
        s += &format!("replicas = {}\n", self.replicas);
        s += &format!("bessel_replicas = {}\n", self.bessel_replicas);
        s += &format!("seed = {}\n", self.seed);
        s += &format!("workers = {}\n", self.workers);
        s += &format!("batch = {}\n", self.batch);
        s += &format!("out = {}\n", self.out);
        s
    }

    /// SHA-256 (hex) of the canonical text without the scheduling and
    /// output keys, so it identifies the sampled numbers.
    pub fn hash(&self) -> String {
        let text: String = self
            .to_text()
            .lines()
            .filter(|l| !UNHASHED.iter().any(|k| l.split('=').next().map(str::trim) == Some(k)))
            .flat_map(|l| [l, "\n"])
            .collect();
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn kind(&self) -> Result<Kind> {
        self.kind.ok_or_else(|| cfg_err("kind", "missing"))
    }

    /// Range checks with one diagnostic per offending field.
    pub fn validate(&self) -> std::result::Result<(), Vec<Error>> {
        let mut errs = Vec::new();
        let mut bad = |field: &str, reason: String| errs.push(cfg_err(field, reason));
        let kind = self.kind;
        if kind.is_none() {
            bad("kind", "missing".into());
        }
        if !(1..=2).contains(&self.dim) {
            bad("dim", format!("{} not in {{1, 2}}", self.dim));
        }
        match self.kernel {
            KernelFamily::Triangular1d if self.dim != 1 => bad("kernel", "triangular-1d needs dim = 1".into()),
            KernelFamily::UserTabulated if self.kernel_table.len() < 2 => bad("kernel_table", "user-tabulated needs at least 2 values".into()),
            _ => {}
        }
        if self.m < 2 {
            bad("m", "need at least 2 cells per side".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            bad("dt", "must be positive".into());
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            bad("t_max", "must be non-negative".into());
        } else if self.dt > 0.0 {
            let r = self.t_max / self.dt;
            if (r - r.round()).abs() > 1e-9 * r.max(1.0) {
                bad("t_max", format!("{} is not a multiple of dt = {}", self.t_max, self.dt));
            }
        }
        if self.modes < 1 {
            bad("modes", "need at least one mode".into());
        }
        if kind == Some(Kind::Gumbel) && self.m < 2 * self.modes {
            bad("m", format!("{} below 2 * modes = {}", self.m, 2 * self.modes));
        }
        if !(1..=crate::brw::MAX_DN).contains(&(self.generations * self.dim)) {
            bad("generations", format!("need 1 <= generations * dim <= {}", crate::brw::MAX_DN));
        }
        let gc = crate::gamma_c(self.dim);
        if self.gamma.is_empty() {
            bad("gamma", "empty list".into());
        }
        if let Some(g) = self.gamma.iter().find(|g| !(0.0..=gc).contains(*g)) {
            bad("gamma", format!("{g} outside [0, {gc}]"));
        } else if kind == Some(Kind::Factor2) && self.gamma.iter().any(|&g| g >= gc) {
            bad("gamma", format!("factor2 needs every gamma below {gc}"));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            bad("beta", "must be positive".into());
        }
        if self.q.is_empty() || self.q.iter().any(|q| !(*q > 0.0 && *q < 1.0)) {
            bad("q", "need a non-empty list inside (0, 1)".into());
        }
        if self.radii.iter().any(|r| !(*r > 0.0 && *r <= 0.5)) {
            bad("radii", "each radius must lie in (0, 0.5]".into());
        }
        if self.thresholds.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            bad("thresholds", "must be positive".into());
        }
        if self.ladder.iter().any(|t| !(*t > 0.0 && *t <= self.t_max)) {
            bad("ladder", "each entry must lie in (0, t_max]".into());
        }
        if kind == Some(Kind::StarEq) && !(self.t_split >= 0.0 && self.t_split < self.t_max) {
            bad("t_split", "need 0 <= t_split < t_max".into());
        }
        if !(self.shift >= 0.0 && self.shift.is_finite()) {
            bad("shift", "must be non-negative".into());
        }
        if self.replicas < 1 {
            bad("replicas", "need at least one".into());
        }
        if self.bessel_replicas < 1 {
            bad("bessel_replicas", "need at least one".into());
        }
        if self.workers < 1 {
            bad("workers", "need at least one".into());
        }
        if self.batch < 1 {
            bad("batch", "need at least one".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut c = ExperimentConfig { kind: Some(Kind::ShRatio), ..Default::default() };
        c.gamma = vec![0.1, 1.0 / 3.0, 1e-300];
        c.t_max = 9.0;
        let back = ExperimentConfig::parse(&c.to_text()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), c.to_text());
    }

    #[test]
    fn json_round_trip() {
        let c = ExperimentConfig { kind: Some(Kind::Brw), radii: vec![0.1, 0.2], ..Default::default() };
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::parse(&json).unwrap(), c);
    }

    #[test]
    fn comments_and_lists() {
        let c = ExperimentConfig::parse("# header\nkind = factor2  # trailing\ngamma = 1.0, 1.1,1.2\n\nm=64\n").unwrap();
        assert_eq!(c.kind, Some(Kind::Factor2));
        assert_eq!(c.gamma, vec![1.0, 1.1, 1.2]);
        assert_eq!(c.m, 64);
    }

    #[test]
    fn field_level_errors() {
        let e = ExperimentConfig::parse("bogus = 1").unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "bogus"));
        let e = ExperimentConfig::parse("m = -3").unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "m"));
        let e = ExperimentConfig::parse("kernel = gaussian").unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "kernel"), "{e}");
        let c = ExperimentConfig { kind: Some(Kind::Sample), dim: 3, beta: -1.0, ..Default::default() };
        let errs = c.validate().unwrap_err();
        let fields: Vec<String> = errs.iter().map(|e| match e { Error::Config { field, .. } => field.clone(), _ => String::new() }).collect();
        assert!(fields.contains(&"dim".to_string()) && fields.contains(&"beta".to_string()));
    }

    #[test]
    fn hash_ignores_scheduling() {
        let a = ExperimentConfig { kind: Some(Kind::Tail), ..Default::default() };
        let b = ExperimentConfig { workers: 8, out: "elsewhere".into(), batch: 3, ..a.clone() };
        let c = ExperimentConfig { seed: 1, ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
