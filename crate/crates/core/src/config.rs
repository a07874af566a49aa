//! Flat `key = value` configuration files.
//!
//! Keys are dotted (`pump.phi0`) or grouped under a `[section]` header, in
//! which case `phi0 = ...` under `[pump]` means `pump.phi0`. `#` starts a
//! comment. Numbers accept a trailing `pi` factor (`0.5pi`, `pi/2`, `1.5*pi`).
//! Absent keys keep the values of [`make_default_config`].
//!
//! | key | meaning |
//! |-----|---------|
//! | `grid.n_points` | grid size (≥ 16) |
//! | `grid.xi_max`, `grid.xi_min` | grid edges; default `±1.2 · model.tf_half_length_xi` |
//! | `model.total_atoms` | condensate atom number |
//! | `model.tf_half_length_xi` | Thomas-Fermi half-length in `ξ` |
//! | `pump.chi0` | dimensionless coupling |
//! | `pump.phi0` | initial relative phase, `[0, 2π)` |
//! | `seed.forward`, `seed.backward` | seed atoms in (1,1) and (-1,-1) |
//! | `seed.phase_forward`, `seed.phase_backward` | seed phases, radians |
//! | `time.tau_end`, `time.dtau` | pulse length and step in `τ` |
//! | `sweep.axis` | `phi0`, `coupling`, `seed` or `duration` |
//! | `sweep.values` | comma-separated axis values |
//! | `sweep.phi0_points` | inner `φ₀` grid size for non-`phi0` axes |
//! | `sweep.phi0_spacing` | `uniform` or `experimental` (0.3π steps) |
//! | `sweep.parallelism` | worker count |
//! | `sweep.mirror_family` | `true` doubles the reported backward fraction |

use std::collections::BTreeSet;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{make_default_config, ConfigError, SpatialGrid, GRID_MARGIN};
use crate::sweep::{Phi0Grid, SweepAxis, SweepSpec};
use crate::Config;

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed entry {content:?} (expected `key = value`)")]
    Malformed { line: usize, content: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: cannot parse {value:?} for {key}")]
    InvalidValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error(transparent)]
    OutOfRange(#[from] ConfigError),
}

const KNOWN_KEYS: &[&str] = &[
    "grid.n_points",
    "grid.xi_max",
    "grid.xi_min",
    "model.total_atoms",
    "model.tf_half_length_xi",
    "pump.chi0",
    "pump.phi0",
    "seed.forward",
    "seed.backward",
    "seed.phase_forward",
    "seed.phase_backward",
    "time.tau_end",
    "time.dtau",
    "sweep.axis",
    "sweep.values",
    "sweep.phi0_points",
    "sweep.phi0_spacing",
    "sweep.parallelism",
    "sweep.mirror_family",
];

/// Parsed file: the simulation config plus any sweep settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub sim: Config,
    pub sweep: SweepSettings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub axis: Option<SweepAxis>,
    pub values: Option<Vec<f64>>,
    pub phi0_grid: Phi0Grid,
    pub parallelism: Option<usize>,
    pub mirror_family: bool,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            axis: None,
            values: None,
            phi0_grid: Phi0Grid::Uniform(16),
            parallelism: None,
            mirror_family: false,
        }
    }
}

impl ConfigFile {
    /// Sweep spec from the file; the axis defaults to `phi0` over the inner grid.
    pub fn sweep_spec(&self) -> SweepSpec {
        let axis = self.sweep.axis.unwrap_or(SweepAxis::Phi0);
        let values = match (&self.sweep.values, axis) {
            (Some(v), _) => v.clone(),
            (None, SweepAxis::Phi0) => self.sweep.phi0_grid.values(),
            (None, other) => other.default_values(),
        };
        let mut spec = SweepSpec::new(self.sim, axis, values);
        spec.phi0_grid = self.sweep.phi0_grid;
        spec.mirror_family = self.sweep.mirror_family;
        if let Some(p) = self.sweep.parallelism {
            spec.parallelism = p;
        }
        spec
    }
}

/// Parses a number with an optional `pi` factor.
pub fn parse_scalar(s: &str) -> Option<f64> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if t.is_empty() {
        return None;
    }
    if let Some(rest) = t.strip_prefix("pi/") {
        return f64::from_str(rest).ok().map(|d| std::f64::consts::PI / d);
    }
    if let Some(head) = t.strip_suffix("pi") {
        let head = head.strip_suffix('*').unwrap_or(head);
        let factor = match head {
            "" => 1.0,
            "-" => -1.0,
            h => f64::from_str(h).ok()?,
        };
        return Some(factor * std::f64::consts::PI);
    }
    f64::from_str(&t).ok()
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

pub fn parse_config(path: &Path) -> Result<ConfigFile, ConfigFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ConfigFile, ConfigFileError> {
    let mut cfg = make_default_config::<f64>();
    let mut sweep = SweepSettings::default();
    let mut seen = BTreeSet::new();
    let mut section = String::new();
    let mut xi_max: Option<f64> = None;
    let mut xi_min: Option<f64> = None;
    let mut n_points = cfg.grid.n_points();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            let name = content
                .strip_prefix('[')
                .and_then(|c| c.strip_suffix(']'))
                .map(str::trim)
                .filter(|n| !n.is_empty() && !n.contains(char::is_whitespace));
            match name {
                Some(n) => section = n.to_string(),
                None => {
                    return Err(ConfigFileError::Malformed {
                        line,
                        content: raw.to_string(),
                    })
                }
            }
            continue;
        }
        let (k, v) = match content.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => (k.trim(), v.trim()),
            _ => {
                return Err(ConfigFileError::Malformed {
                    line,
                    content: raw.to_string(),
                })
            }
        };
        let key = if section.is_empty() || k.contains('.') {
            k.to_string()
        } else {
            format!("{section}.{k}")
        };
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(ConfigFileError::UnknownKey { line, key });
        }
        if !seen.insert(key.clone()) {
            return Err(ConfigFileError::DuplicateKey { line, key });
        }
        let bad = || ConfigFileError::InvalidValue {
            line,
            key: key.clone(),
            value: v.to_string(),
        };
        let num = || parse_scalar(v).ok_or_else(bad);
        let count = || v.parse::<usize>().map_err(|_| bad());

        match key.as_str() {
            "grid.n_points" => n_points = count()?,
            "grid.xi_max" => xi_max = Some(num()?),
            "grid.xi_min" => xi_min = Some(num()?),
            "model.total_atoms" => cfg.total_atoms = num()?,
            "model.tf_half_length_xi" => cfg.tf_half_length_xi = num()?,
            "pump.chi0" => cfg.pump.chi0 = num()?,
            "pump.phi0" => cfg.pump.phi0 = num()?,
            "seed.forward" => cfg.seed_forward = num()?,
            "seed.backward" => cfg.seed_backward = num()?,
            "seed.phase_forward" => cfg.seed_phase_forward = num()?,
            "seed.phase_backward" => cfg.seed_phase_backward = num()?,
            "time.tau_end" => cfg.tau_end = num()?,
            "time.dtau" => cfg.dtau = num()?,
            "sweep.axis" => sweep.axis = Some(v.parse().map_err(|_| bad())?),
            "sweep.values" => {
                let vals: Option<Vec<f64>> = v.split(',').map(parse_scalar).collect();
                sweep.values = Some(vals.ok_or_else(bad)?);
            }
            "sweep.phi0_points" => {
                if !matches!(sweep.phi0_grid, Phi0Grid::Uniform(_)) {
                    return Err(bad());
                }
                sweep.phi0_grid = Phi0Grid::Uniform(count()?);
            }
            "sweep.phi0_spacing" => match v.to_ascii_lowercase().as_str() {
                "uniform" => {}
                "experimental" => sweep.phi0_grid = Phi0Grid::Experimental,
                _ => return Err(bad()),
            },
            "sweep.parallelism" => sweep.parallelism = Some(count()?),
            "sweep.mirror_family" => sweep.mirror_family = parse_bool(v).ok_or_else(bad)?,
            _ => unreachable!("key list and match arms out of sync: {key}"),
        }
    }

    let hi = xi_max.unwrap_or(GRID_MARGIN * cfg.tf_half_length_xi);
    let lo = xi_min.unwrap_or(-hi);
    cfg.grid = SpatialGrid::new(lo, hi, n_points)?;
    cfg.validate()?;
    Ok(ConfigFile { sim: cfg, sweep })
}
