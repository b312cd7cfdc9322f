//! Flat `key=value` experiment configuration.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

/// Hard ceiling on the Hilbert-space dimension of RMT runs.
pub const MAX_DIM: usize = 256;

#[derive(Debug, Error)]
#[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), message: message.into() }
    }

    fn global(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    RmtSweep,
    AnniSweep,
    ScramblingProbe,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::RmtSweep => "rmt-sweep",
            Self::AnniSweep => "anni-sweep",
            Self::ScramblingProbe => "scrambling-probe",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rmt-sweep" => Ok(Self::RmtSweep),
            "anni-sweep" => Ok(Self::AnniSweep),
            "scrambling-probe" => Ok(Self::ScramblingProbe),
            other => Err(format!("unknown experiment kind `{other}`")),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Effective experiment configuration. See the README for key semantics.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Matrix dimension for RMT sweeps.
    pub dim: usize,
    /// Chain length for ANNI runs.
    pub sites: usize,
    pub max_sites: usize,
    pub x_grid: Vec<f64>,
    pub g_grid: Vec<f64>,
    pub h: f64,
    pub ensemble: usize,
    pub t_max: f64,
    pub t_points: usize,
    pub tau_max: f64,
    pub tau_points: usize,
    pub tau_fixed: f64,
    pub seed: u64,
    pub lanczos_tol: f64,
    pub max_krylov: usize,
    /// Degeneracy and resonance tolerance relative to the spectral range.
    pub degeneracy_tol: f64,
    /// Krylov indices with size-resolved coefficient maps.
    pub snapshots: Vec<usize>,
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::RmtSweep,
            dim: 60,
            sites: 6,
            max_sites: 7,
            x_grid: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            g_grid: vec![0.01, 0.1, 0.5, 1.0],
            h: 1.0,
            ensemble: 20,
            t_max: 20.0,
            t_points: 200,
            tau_max: 5.0,
            tau_points: 100,
            tau_fixed: 1.0,
            seed: 20240601,
            lanczos_tol: 1e-8,
            max_krylov: 100_000,
            degeneracy_tol: 1e-10,
            snapshots: vec![0, 5, 10, 20],
            workers: 0,
        }
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T, ConfigError> {
    raw.parse().map_err(|_| ConfigError::at(line, format!("`{key}`: cannot parse `{raw}`")))
}

fn parse_list<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<Vec<T>, ConfigError> {
    raw.split(',').map(|item| parse_value(line, key, item.trim())).collect()
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::at(line, format!("expected key=value, found `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(ConfigError::at(line, format!("duplicate key `{key}`")));
            }
            cfg.set(line, key, value)?;
            seen.push(key.to_string());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::global(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn set(&mut self, line: usize, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "kind" => self.kind = v.parse().map_err(|e: String| ConfigError::at(line, e))?,
            "dim" => self.dim = parse_value(line, key, v)?,
            "L" => self.sites = parse_value(line, key, v)?,
            "max_L" => self.max_sites = parse_value(line, key, v)?,
            "x_grid" => self.x_grid = parse_list(line, key, v)?,
            "g_grid" => self.g_grid = parse_list(line, key, v)?,
            "h" => self.h = parse_value(line, key, v)?,
            "ensemble" => self.ensemble = parse_value(line, key, v)?,
            "t_max" => self.t_max = parse_value(line, key, v)?,
            "t_points" => self.t_points = parse_value(line, key, v)?,
            "tau_max" => self.tau_max = parse_value(line, key, v)?,
            "tau_points" => self.tau_points = parse_value(line, key, v)?,
            "tau_fixed" => self.tau_fixed = parse_value(line, key, v)?,
            "seed" => self.seed = parse_value(line, key, v)?,
            "lanczos_tol" => self.lanczos_tol = parse_value(line, key, v)?,
            "max_krylov" => self.max_krylov = parse_value(line, key, v)?,
            "degeneracy_tol" => self.degeneracy_tol = parse_value(line, key, v)?,
            "snapshots" => self.snapshots = if v.is_empty() { Vec::new() } else { parse_list(line, key, v)? },
            "workers" => self.workers = parse_value(line, key, v)?,
            other => return Err(ConfigError::at(line, format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: &str| Err(ConfigError::global(m));
        if self.sites < 2 || self.sites > self.max_sites {
            return Err(ConfigError::global(format!(
                "L = {} outside the memory budget 2..={}",
                self.sites, self.max_sites
            )));
        }
        if self.max_sites > krylovlab_core::hamiltonian::MAX_ANNI_SITES {
            return fail("max_L exceeds the supported chain length");
        }
        if self.dim < 2 || self.dim > MAX_DIM {
            return Err(ConfigError::global(format!("dim = {} outside 2..={MAX_DIM}", self.dim)));
        }
        if self.x_grid.is_empty() || self.g_grid.is_empty() {
            return fail("parameter grids must be nonempty");
        }
        if self.x_grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return fail("x_grid values must lie in [0, 1]");
        }
        if self.g_grid.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return fail("g_grid values must be finite and nonnegative");
        }
        if !self.h.is_finite() {
            return fail("h must be finite");
        }
        if self.ensemble == 0 {
            return fail("ensemble must be positive");
        }
        if self.t_points < 2 || self.tau_points < 1 {
            return fail("time grids need t_points >= 2 and tau_points >= 1");
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite() && self.tau_max > 0.0 && self.tau_max.is_finite()) {
            return fail("t_max and tau_max must be positive");
        }
        if !(self.tau_fixed > 0.0 && self.tau_fixed.is_finite()) {
            return fail("tau_fixed must be positive");
        }
        if !(self.lanczos_tol > 0.0 && self.lanczos_tol <= 1e-4) {
            return fail("lanczos_tol must lie in (0, 1e-4]");
        }
        if self.max_krylov == 0 {
            return fail("max_krylov must be positive");
        }
        if !(self.degeneracy_tol >= 0.0 && self.degeneracy_tol.is_finite()) {
            return fail("degeneracy_tol must be nonnegative");
        }
        Ok(())
    }

    /// Sample times `t_k = k t_max / (t_points - 1)`, starting at 0.
    pub fn time_grid(&self) -> Vec<f64> {
        let step = self.t_max / (self.t_points - 1) as f64;
        (0..self.t_points).map(|k| k as f64 * step).collect()
    }

    /// Horizons `tau_k = k tau_max / tau_points` for `k = 1..=tau_points`.
    pub fn tau_grid(&self) -> Vec<f64> {
        let step = self.tau_max / self.tau_points as f64;
        (1..=self.tau_points).map(|k| k as f64 * step).collect()
    }

    /// Canonical `key=value` listing that parses back to `self`.
    pub fn resolved(&self) -> String {
        let mut s = String::new();
        let pairs: [(&str, String); 19] = [
            ("kind", self.kind.to_string()),
            ("dim", self.dim.to_string()),
            ("L", self.sites.to_string()),
            ("max_L", self.max_sites.to_string()),
            ("x_grid", join(&self.x_grid)),
            ("g_grid", join(&self.g_grid)),
            ("h", self.h.to_string()),
            ("ensemble", self.ensemble.to_string()),
            ("t_max", self.t_max.to_string()),
            ("t_points", self.t_points.to_string()),
            ("tau_max", self.tau_max.to_string()),
            ("tau_points", self.tau_points.to_string()),
            ("tau_fixed", self.tau_fixed.to_string()),
            ("seed", self.seed.to_string()),
            ("lanczos_tol", format!("{:e}", self.lanczos_tol)),
            ("max_krylov", self.max_krylov.to_string()),
            ("degeneracy_tol", format!("{:e}", self.degeneracy_tol)),
            ("snapshots", join(&self.snapshots)),
            ("workers", self.workers.to_string()),
        ];
        for (k, v) in pairs {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }
}
