//! Run configuration: defaults, config-file parsing, and command-line
//! override merging.
//!
//! Resolution order: built-in defaults, then the config file (if any), then
//! explicit command-line flags. `show-config` prints the resolved result in
//! the same format the parser accepts.

use std::fmt;
use std::path::Path;

use crate::error::{Result, SimError};

/// Resolved run parameters shared by every sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// Target reflectivity when the target is present.
    pub eta: f64,
    /// Single-pass survival probability of the lossy path.
    pub p: f64,
    /// Mean photon number of the thermal background.
    pub thermal_n: f64,
    /// Mean photon number of the retained probe mode; fixes the squeezing
    /// parameter per truncation dimension.
    pub nt: f64,
    /// Fock-space truncation dimension per mode.
    pub dim: usize,
    /// Interference weight of the control superposition.
    pub gamma: f64,
    /// Width tolerance for the s-minimization search.
    pub tol_s: f64,
    /// Worker threads for sweep evaluation.
    pub jobs: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            eta: 0.1,
            p: 0.8,
            thermal_n: 0.5,
            nt: 0.01,
            dim: 10,
            gamma: 1.0,
            tol_s: 1e-6,
            jobs: 1,
        }
    }
}

/// Parameters set explicitly by a config file or command-line flag. `None`
/// means the source did not mention the key, so weaker sources stand.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub eta: Option<f64>,
    pub p: Option<f64>,
    pub thermal_n: Option<f64>,
    pub nt: Option<f64>,
    pub dim: Option<usize>,
    pub gamma: Option<f64>,
    pub tol_s: Option<f64>,
    pub jobs: Option<usize>,
}

impl Overrides {
    /// Applies one `key = value` assignment.
    fn assign(&mut self, key: &str, value: &str, line_no: usize) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str, line_no: usize) -> Result<T> {
            value.parse().map_err(|_| {
                SimError::Config(format!("line {line_no}: invalid value {value:?} for {key}"))
            })
        }
        match key {
            "eta" => self.eta = Some(num(key, value, line_no)?),
            "p" => self.p = Some(num(key, value, line_no)?),
            "thermal_n" => self.thermal_n = Some(num(key, value, line_no)?),
            "nt" => self.nt = Some(num(key, value, line_no)?),
            "dim" => self.dim = Some(num(key, value, line_no)?),
            "gamma" => self.gamma = Some(num(key, value, line_no)?),
            "tol_s" => self.tol_s = Some(num(key, value, line_no)?),
            "jobs" => self.jobs = Some(num(key, value, line_no)?),
            _ => return Err(SimError::Config(format!("line {line_no}: unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Parses config text: one `key = value` per line; `#` comments and
    /// blank lines are skipped; unknown keys are errors.
    pub fn parse_str(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SimError::Config(format!("line {line_no}: expected `key = value`, got {raw:?}"))
            })?;
            self.assign(key.trim(), value.trim(), line_no)?;
        }
        Ok(())
    }

    /// Reads and parses a config file; `None` yields an empty set.
    pub fn from_path(path: Option<&Path>) -> Result<Self> {
        let mut out = Overrides::default();
        if let Some(path) = path {
            out.parse_str(&std::fs::read_to_string(path)?)?;
        }
        Ok(out)
    }

    /// Field-wise precedence merge: values in `self` win, holes fall back to
    /// `weaker`.
    pub fn or(&self, weaker: &Overrides) -> Overrides {
        Overrides {
            eta: self.eta.or(weaker.eta),
            p: self.p.or(weaker.p),
            thermal_n: self.thermal_n.or(weaker.thermal_n),
            nt: self.nt.or(weaker.nt),
            dim: self.dim.or(weaker.dim),
            gamma: self.gamma.or(weaker.gamma),
            tol_s: self.tol_s.or(weaker.tol_s),
            jobs: self.jobs.or(weaker.jobs),
        }
    }
}

impl SimConfig {
    /// Builds a validated config from defaults plus the given assignments.
    pub fn from_overrides(overrides: &Overrides) -> Result<Self> {
        let mut cfg = SimConfig::default();
        if let Some(v) = overrides.eta {
            cfg.eta = v;
        }
        if let Some(v) = overrides.p {
            cfg.p = v;
        }
        if let Some(v) = overrides.thermal_n {
            cfg.thermal_n = v;
        }
        if let Some(v) = overrides.nt {
            cfg.nt = v;
        }
        if let Some(v) = overrides.dim {
            cfg.dim = v;
        }
        if let Some(v) = overrides.gamma {
            cfg.gamma = v;
        }
        if let Some(v) = overrides.tol_s {
            cfg.tol_s = v;
        }
        if let Some(v) = overrides.jobs {
            cfg.jobs = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Builds the effective config from defaults, an optional file, and
    /// command-line overrides, in that precedence order.
    pub fn resolve(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        Self::from_overrides(&overrides.or(&Overrides::from_path(path)?))
    }

    fn validate(&self) -> Result<()> {
        let checks = [
            ("eta", (0.0..=1.0).contains(&self.eta)),
            ("p", (0.0..=1.0).contains(&self.p)),
            ("thermal_n", self.thermal_n >= 0.0),
            ("nt", self.nt >= 0.0),
            ("gamma", (-1.0..=1.0).contains(&self.gamma)),
            ("tol_s", self.tol_s > 0.0 && self.tol_s < 1.0),
            ("dim", self.dim >= 2),
            ("jobs", self.jobs >= 1),
        ];
        for (name, ok) in checks {
            if !ok {
                return Err(SimError::Config(format!("{name} out of range")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SimConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "eta = {}", self.eta)?;
        writeln!(f, "p = {}", self.p)?;
        writeln!(f, "thermal_n = {}", self.thermal_n)?;
        writeln!(f, "nt = {}", self.nt)?;
        writeln!(f, "dim = {}", self.dim)?;
        writeln!(f, "gamma = {}", self.gamma)?;
        writeln!(f, "tol_s = {}", self.tol_s)?;
        write!(f, "jobs = {}", self.jobs)
    }
}
