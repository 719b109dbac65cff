//! Flat `key = value` experiment configuration.
//!
//! Lists use brackets (`phi = [0, 0, -0.5]`), `#` starts a comment, and
//! every key except the flux and end states has a default.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Result, ShockError};
use crate::evolve::InitialData;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatumKind {
    DerivBump,
    TrianglePair,
}

impl DatumKind {
    pub fn name(self) -> &'static str {
        match self {
            DatumKind::DerivBump => "deriv_bump",
            DatumKind::TrianglePair => "triangle_pair",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "deriv_bump" => Ok(DatumKind::DerivBump),
            "triangle_pair" => Ok(DatumKind::TrianglePair),
            other => Err(ShockError::Config(format!("unknown datum kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Ascending flux coefficients.
    pub phi: Vec<f64>,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub nu: f64,
    pub half_width: f64,
    pub n: usize,
    /// Time step; `0` selects the evolver default.
    pub dt: f64,
    pub t_end: f64,
    pub datum: DatumKind,
    pub amplitude: f64,
    pub x0: f64,
    pub w0: f64,
    pub epsilon: f64,
    pub trial_times: Vec<f64>,
    pub out: PathBuf,
    pub run_picard: bool,
    pub run_linop_checks: bool,
    /// Number of strip samples, spaced quadratically in time.
    pub samples: usize,
    /// Times of field and spectrum snapshots.
    pub snapshots: Vec<f64>,
    pub picard_horizon: f64,
    pub picard_levels: usize,
}

/// Keys accepted by [`ExperimentConfig::set`] with a numeric value.
pub const NUMERIC_KEYS: &[&str] = &[
    "alpha_minus",
    "alpha_plus",
    "nu",
    "L",
    "N",
    "dt",
    "t_end",
    "A",
    "x0",
    "w0",
    "epsilon",
    "samples",
    "picard_horizon",
    "picard_levels",
];

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>().map_err(|_| ShockError::Config(format!("`{key}`: `{v}` is not a number")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    let x = parse_f64(key, v)?;
    if x < 0.0 || x.fract() != 0.0 || x > u32::MAX as f64 {
        return Err(ShockError::Config(format!("`{key}`: `{v}` is not a non-negative integer")));
    }
    Ok(x as usize)
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| ShockError::Config(format!("`{key}`: expected a bracketed list")))?;
    inner.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse_f64(key, s)).collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ShockError::Config(format!("`{key}`: expected true or false"))),
    }
}

fn fmt_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", items.join(", "))
}

impl ExperimentConfig {
    fn with_required(phi: Vec<f64>, alpha_minus: f64, alpha_plus: f64) -> Self {
        Self {
            phi,
            alpha_minus,
            alpha_plus,
            nu: 1.0,
            half_width: 40.0,
            n: 2048,
            dt: 0.0,
            t_end: 5.0,
            datum: DatumKind::TrianglePair,
            amplitude: 0.05,
            x0: 0.0,
            w0: 1.0,
            epsilon: 0.05,
            trial_times: vec![0.0, 0.5, 1.0, 2.0, 4.0],
            out: PathBuf::from("out"),
            run_picard: true,
            run_linop_checks: true,
            samples: 200,
            snapshots: Vec::new(),
            picard_horizon: 2.0,
            picard_levels: 40,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::with_required(Vec::new(), f64::NAN, f64::NAN);
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ShockError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(ShockError::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            cfg.set(key, value)?;
            seen.push(key.to_string());
        }
        for required in ["phi", "alpha_minus", "alpha_plus"] {
            if !seen.iter().any(|k| k == required) {
                return Err(ShockError::Config(format!("missing key `{required}`")));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ShockError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Assigns one key from its textual value. Does not revalidate.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "phi" => self.phi = parse_list(key, value)?,
            "alpha_minus" => self.alpha_minus = parse_f64(key, value)?,
            "alpha_plus" => self.alpha_plus = parse_f64(key, value)?,
            "nu" => self.nu = parse_f64(key, value)?,
            "L" => self.half_width = parse_f64(key, value)?,
            "N" => self.n = parse_usize(key, value)?,
            "dt" => self.dt = parse_f64(key, value)?,
            "t_end" => self.t_end = parse_f64(key, value)?,
            "datum" => self.datum = DatumKind::parse(value)?,
            "A" => self.amplitude = parse_f64(key, value)?,
            "x0" => self.x0 = parse_f64(key, value)?,
            "w0" => self.w0 = parse_f64(key, value)?,
            "epsilon" => self.epsilon = parse_f64(key, value)?,
            "trial_times" => self.trial_times = parse_list(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "run_picard" => self.run_picard = parse_bool(key, value)?,
            "run_linop_checks" => self.run_linop_checks = parse_bool(key, value)?,
            "samples" => self.samples = parse_usize(key, value)?,
            "snapshots" => self.snapshots = parse_list(key, value)?,
            "picard_horizon" => self.picard_horizon = parse_f64(key, value)?,
            "picard_levels" => self.picard_levels = parse_usize(key, value)?,
            other => return Err(ShockError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ShockError::Config(msg));
        let scalars = [
            ("alpha_minus", self.alpha_minus),
            ("alpha_plus", self.alpha_plus),
            ("nu", self.nu),
            ("L", self.half_width),
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("A", self.amplitude),
            ("x0", self.x0),
            ("w0", self.w0),
            ("epsilon", self.epsilon),
            ("picard_horizon", self.picard_horizon),
        ];
        if let Some((k, _)) = scalars.iter().find(|(_, v)| !v.is_finite()) {
            return bad(format!("`{k}` must be finite"));
        }
        for (k, list) in [("phi", &self.phi), ("trial_times", &self.trial_times), ("snapshots", &self.snapshots)] {
            if list.iter().any(|v| !v.is_finite()) {
                return bad(format!("`{k}` entries must be finite"));
            }
        }
        if self.phi.is_empty() {
            return bad("`phi` is empty".into());
        }
        if !(self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return bad(format!("epsilon must lie in (0, 1], got {}", self.epsilon));
        }
        if !self.n.is_power_of_two() || self.n < 16 {
            return bad(format!("N must be a power of two >= 16, got {}", self.n));
        }
        if !(self.nu > 0.0 && self.half_width > 0.0 && self.w0 > 0.0) {
            return bad("nu, L and w0 must be positive".into());
        }
        if self.dt < 0.0 || self.picard_horizon <= 0.0 {
            return bad("dt must be >= 0 and picard_horizon > 0".into());
        }
        if self.trial_times.iter().chain(&self.snapshots).any(|t| *t < 0.0) {
            return bad("trial and snapshot times must be >= 0".into());
        }
        if self.samples < 3 || self.picard_levels < 2 {
            return bad("samples must be >= 3 and picard_levels >= 2".into());
        }
        Ok(())
    }

    /// Datum in the normalized frame, where lengths are divided by `scale`.
    pub fn initial_data(&self, scale: f64) -> InitialData {
        let (amplitude, center, width) = (self.amplitude, self.x0 / scale, self.w0 / scale);
        match self.datum {
            DatumKind::DerivBump => InitialData::DerivBump { amplitude: amplitude / scale, center, width },
            DatumKind::TrianglePair => InitialData::TrianglePair { amplitude, center, width },
        }
    }

    /// Canonical text form; parses back to an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "phi = {}", fmt_list(&self.phi));
        let _ = writeln!(s, "alpha_minus = {:?}", self.alpha_minus);
        let _ = writeln!(s, "alpha_plus = {:?}", self.alpha_plus);
        let _ = writeln!(s, "nu = {:?}", self.nu);
        let _ = writeln!(s, "L = {:?}", self.half_width);
        let _ = writeln!(s, "N = {}", self.n);
        let _ = writeln!(s, "dt = {:?}", self.dt);
        let _ = writeln!(s, "t_end = {:?}", self.t_end);
        let _ = writeln!(s, "datum = {}", self.datum.name());
        let _ = writeln!(s, "A = {:?}", self.amplitude);
        let _ = writeln!(s, "x0 = {:?}", self.x0);
        let _ = writeln!(s, "w0 = {:?}", self.w0);
        let _ = writeln!(s, "epsilon = {:?}", self.epsilon);
        let _ = writeln!(s, "trial_times = {}", fmt_list(&self.trial_times));
        let _ = writeln!(s, "out = {}", self.out.display());
        let _ = writeln!(s, "run_picard = {}", self.run_picard);
        let _ = writeln!(s, "run_linop_checks = {}", self.run_linop_checks);
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "snapshots = {}", fmt_list(&self.snapshots));
        let _ = writeln!(s, "picard_horizon = {:?}", self.picard_horizon);
        let _ = writeln!(s, "picard_levels = {}", self.picard_levels);
        s
    }
}
