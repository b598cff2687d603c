//! Sweep configuration and its flat `key = value` file format.
//!
//! ```text
//! # gate-error sweep with T2 = T1
//! t_step = 25e-9
//! t2_ratio = 1
//! p_steps = 1e-4, 1e-3, 1e-2
//! gate_errors = 0, 1e-3, 1e-2
//! phi = pi/4
//! modes = exact, pta
//! ```

use std::path::Path;
use std::str::FromStr;

use pta_core::protocol::{
    SimMode, DEFAULT_MASS_BUDGET, DEFAULT_MAX_CYCLES, DEFAULT_PRUNE_THRESHOLD,
};

use crate::error::HarnessError;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    /// Duration of one circuit step in seconds.
    pub t_step: f64,
    /// `T2 / T1`, held fixed while `T1` is varied.
    pub t2_ratio: f64,
    pub alpha: f64,
    pub p_steps: Vec<f64>,
    /// Total intrinsic CZ errors, split evenly between `E1` and `delta`.
    pub gate_errors: Vec<f64>,
    pub phi: f64,
    pub modes: Vec<SimMode>,
    /// Trials per point for Monte Carlo mode.
    pub trials: usize,
    pub max_cycles: usize,
    pub prune_threshold: f64,
    pub mass_budget: f64,
    pub seed: u64,
    /// Record wall-clock time per row. Off by default so output is reproducible.
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            t_step: 25e-9,
            t2_ratio: 1.0,
            alpha: 0.0,
            p_steps: log_grid(1e-4, 1e-1, 13),
            gate_errors: vec![0.0, 1e-4, 1e-3, 1e-2, 0.1],
            phi: 0.0,
            modes: vec![SimMode::Exact, SimMode::Pta],
            trials: 10_000,
            max_cycles: DEFAULT_MAX_CYCLES,
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
            mass_budget: DEFAULT_MASS_BUDGET,
            seed: 1,
            timing: false,
        }
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| {
            let x = 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64);
            // snap to the shortest decimal so grid values print cleanly
            format!("{x:.12e}").parse().unwrap_or(x)
        })
        .collect()
}

/// Parses a float, also accepting `pi`, `pi/N` and `K*pi/N`.
pub fn parse_angle(s: &str) -> Result<f64, HarnessError> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if let Some(pos) = t.find("pi") {
        let coeff = match &t[..pos] {
            "" => 1.0,
            "-" => -1.0,
            c => c
                .trim_end_matches('*')
                .parse::<f64>()
                .map_err(|_| bad_value("phi", s))?,
        };
        let rest = &t[pos + 2..];
        let div = if rest.is_empty() {
            1.0
        } else {
            rest.strip_prefix('/')
                .ok_or_else(|| bad_value("phi", s))?
                .parse::<f64>()
                .map_err(|_| bad_value("phi", s))?
        };
        return Ok(coeff * std::f64::consts::PI / div);
    }
    t.parse().map_err(|_| bad_value("phi", s))
}

fn bad_value(key: &str, value: &str) -> HarnessError {
    HarnessError::Config(format!("invalid value for {key}: {value:?}"))
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, HarnessError> {
    v.trim().parse().map_err(|_| bad_value(key, v))
}

pub fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, HarnessError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

pub fn parse_modes(v: &str) -> Result<Vec<SimMode>, HarnessError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<SimMode>().map_err(|_| bad_value("modes", v)))
        .collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool, HarnessError> {
    match v.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(bad_value(key, v)),
    }
}

impl SweepConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let key = key.trim().replace('-', "_");
        match key.as_str() {
            "t_step" => self.t_step = parse_num(&key, value)?,
            "t2_ratio" | "t2_over_t1" => self.t2_ratio = parse_num(&key, value)?,
            "alpha" => self.alpha = parse_num(&key, value)?,
            "p_steps" | "p_step" => self.p_steps = parse_list(&key, value)?,
            "gate_errors" | "gate_error" | "e" => self.gate_errors = parse_list(&key, value)?,
            "phi" => self.phi = parse_angle(value)?,
            "modes" | "mode" => self.modes = parse_modes(value)?,
            "trials" => self.trials = parse_num(&key, value)?,
            "max_cycles" => self.max_cycles = parse_num(&key, value)?,
            "prune_threshold" | "prune" => self.prune_threshold = parse_num(&key, value)?,
            "mass_budget" | "budget" => self.mass_budget = parse_num(&key, value)?,
            "seed" => self.seed = parse_num(&key, value)?,
            "timing" => self.timing = parse_bool(&key, value)?,
            _ => return Err(HarnessError::Config(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Overlays settings from `key = value` text; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), HarnessError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!(
                    "line {}: expected key = value, got {raw:?}",
                    lineno + 1
                ))
            })?;
            self.set(k, v)
                .map_err(|e| HarnessError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Serializes back to the `key = value` format.
    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let modes = self
            .modes
            .iter()
            .map(|m| m.as_str())
            .collect::<Vec<_>>()
            .join(", ");
        format!(
            "t_step = {}\nt2_ratio = {}\nalpha = {}\np_steps = {}\ngate_errors = {}\nphi = {}\nmodes = {}\ntrials = {}\nmax_cycles = {}\nprune_threshold = {}\nmass_budget = {}\nseed = {}\ntiming = {}\n",
            self.t_step,
            self.t2_ratio,
            self.alpha,
            list(&self.p_steps),
            list(&self.gate_errors),
            self.phi,
            modes,
            self.trials,
            self.max_cycles,
            self.prune_threshold,
            self.mass_budget,
            self.seed,
            self.timing
        )
    }
}
