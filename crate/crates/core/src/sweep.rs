//! Parameter sweeps over the simulator.
//!
//! Every sweep point is an independent simulation. Points run on a bounded
//! rayon pool and are collected in request order, so the output does not
//! depend on scheduling.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{fit_phase_response, FitError, MIN_FIT_POINTS};
use crate::model::chi0_for_coupling;
use crate::solver::{simulate, SolverError};
use crate::{Config, Fit};

/// Rows whose conservation drift reaches this are flagged.
pub const DRIFT_FLAG: f64 = 1e-6;

/// `φ₀` spacing between experimental shots, `Δω · 10 μs`.
pub const EXPERIMENTAL_PHI0_STEP: f64 = 0.3 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    Phi0,
    /// Coupling factor `g`; `chi0 = chi0_base · (g / 1.5e6)²`.
    Coupling,
    /// Seed atoms, applied to both seeded modes.
    Seed,
    /// Pulse length `τ_end` at fixed beat frequency.
    Duration,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Phi0 => "phi0",
            SweepAxis::Coupling => "coupling",
            SweepAxis::Seed => "seed",
            SweepAxis::Duration => "duration",
        }
    }

    /// The grids of the four experiments.
    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepAxis::Phi0 => Phi0Grid::Uniform(16).values(),
            SweepAxis::Coupling => vec![1.0e6, 1.5e6, 1.6e6, 1.7e6],
            SweepAxis::Seed => vec![0.1, 1.0, 10.0],
            SweepAxis::Duration => vec![PI / 3.0, 2.0 * PI / 3.0, PI, 4.0 * PI / 3.0],
        }
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "phi0" => Ok(SweepAxis::Phi0),
            "coupling" | "g" => Ok(SweepAxis::Coupling),
            "seed" => Ok(SweepAxis::Seed),
            "duration" | "tau_end" => Ok(SweepAxis::Duration),
            other => Err(format!("unknown sweep axis {other:?}")),
        }
    }
}

/// Inner `φ₀` grid used for every non-`phi0` axis value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phi0Grid {
    /// `n` points evenly spaced over `[0, 2π)`.
    Uniform(usize),
    /// Seven points `0, 0.3π, …, 1.8π`.
    Experimental,
}

impl Phi0Grid {
    pub fn values(self) -> Vec<f64> {
        match self {
            Phi0Grid::Uniform(n) => (0..n).map(|k| TAU * k as f64 / n as f64).collect(),
            Phi0Grid::Experimental => (0..7).map(|k| EXPERIMENTAL_PHI0_STEP * k as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Config,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub phi0_grid: Phi0Grid,
    pub parallelism: usize,
    pub sample_every: usize,
    pub mirror_family: bool,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    Invalid(String),
    #[error("{axis} = {value}: {source}")]
    Point {
        axis: &'static str,
        value: f64,
        #[source]
        source: SolverError,
    },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

impl SweepError {
    /// True when the failure is a bad input rather than a numerical problem.
    pub fn is_config(&self) -> bool {
        match self {
            SweepError::Invalid(_) => true,
            SweepError::Point { source, .. } => matches!(
                source,
                SolverError::Config(_)
                    | SolverError::StepTooLarge { .. }
                    | SolverError::ZeroSampleInterval
            ),
            SweepError::Pool(_) => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub phi0: f64,
    pub backward: f64,
    pub forward: f64,
    pub condensate: f64,
    /// `Δφ₀,₁` at the sample nearest `τ_end / 2`; NaN when undefined.
    pub delta_phi01_mid: f64,
    pub drift: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisFit {
    pub axis_value: f64,
    pub fit: Result<Fit, FitError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
    /// One cosine fit per axis value, or a single fit for the `phi0` axis.
    pub fits: Vec<AxisFit>,
}

pub const CSV_HEADER: &str =
    "axis,axis_value,phi0,backward,forward,condensate,delta_phi01_mid,drift,flagged";

impl SweepSpec {
    pub fn new(base: Config, axis: SweepAxis, values: Vec<f64>) -> Self {
        Self {
            base,
            axis,
            values,
            phi0_grid: Phi0Grid::Uniform(16),
            parallelism: default_parallelism(),
            sample_every: 10,
            mirror_family: false,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: String| Err(SweepError::Invalid(m));
        if self.values.is_empty() {
            return bad("no axis values".into());
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return bad(format!("non-finite axis value {v}"));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return bad("axis values must be strictly increasing".into());
        }
        if self.parallelism == 0 {
            return bad("parallelism must be >= 1".into());
        }
        if self.sample_every == 0 {
            return bad("sample_every must be >= 1".into());
        }
        if self.axis != SweepAxis::Phi0 && self.phi0_grid.values().is_empty() {
            return bad("inner phi0 grid is empty".into());
        }
        self.base
            .validate()
            .map_err(|e| SweepError::Invalid(e.to_string()))?;
        for (v, phi0) in self.jobs() {
            self.config_for(v, phi0)
                .validate()
                .map_err(|e| SweepError::Invalid(format!("{} = {v}: {e}", self.axis.name())))?;
        }
        Ok(())
    }

    /// `(axis_value, phi0)` for every simulation, in output order.
    pub fn jobs(&self) -> Vec<(f64, f64)> {
        match self.axis {
            SweepAxis::Phi0 => self.values.iter().map(|&v| (v, v)).collect(),
            _ => {
                let inner = self.phi0_grid.values();
                self.values
                    .iter()
                    .flat_map(|&v| inner.iter().map(move |&p| (v, p)))
                    .collect()
            }
        }
    }

    pub fn config_for(&self, axis_value: f64, phi0: f64) -> Config {
        let mut cfg = self.base;
        cfg.pump.phi0 = phi0;
        match self.axis {
            SweepAxis::Phi0 => {}
            SweepAxis::Coupling => {
                cfg.pump.chi0 = chi0_for_coupling(self.base.pump.chi0, axis_value);
            }
            SweepAxis::Seed => {
                cfg.seed_forward = axis_value;
                cfg.seed_backward = axis_value;
            }
            SweepAxis::Duration => cfg.tau_end = axis_value,
        }
        cfg
    }
}

pub fn default_parallelism() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn run_point(spec: &SweepSpec, axis_value: f64, phi0: f64) -> Result<SweepRow, SweepError> {
    let cfg = spec.config_for(axis_value, phi0);
    let point_err = |source: SolverError| SweepError::Point {
        axis: spec.axis.name(),
        value: axis_value,
        source,
    };
    let traj = simulate(&cfg, spec.sample_every).map_err(point_err)?;
    let [n00, n11, nm] = traj.final_populations();
    let scale = if spec.mirror_family { 2.0 } else { 1.0 };
    let mid = &traj.diagnostics[traj.nearest_sample(cfg.tau_end / 2.0)];
    let drift = traj.max_relative_drift();
    Ok(SweepRow {
        axis_value,
        phi0,
        backward: scale * nm,
        forward: n11,
        condensate: n00,
        delta_phi01_mid: if mid.valid { mid.delta_phi01 } else { f64::NAN },
        drift,
        flagged: drift.is_nan() || drift >= DRIFT_FLAG,
    })
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let jobs = spec.jobs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.parallelism)
        .build()
        .map_err(|e| SweepError::Pool(e.to_string()))?;
    let outcomes: Vec<Result<SweepRow, SweepError>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(v, p)| run_point(spec, v, p))
            .collect()
    });
    // report the first failure in request order, not whichever finished first
    let rows = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    for r in rows.iter().filter(|r| r.flagged) {
        log::warn!(
            "{} = {}, phi0 = {}: conservation drift {:e}",
            spec.axis.name(),
            r.axis_value,
            r.phi0,
            r.drift
        );
    }
    let fits = fit_groups(spec.axis, &rows);
    Ok(SweepResult {
        axis: spec.axis,
        rows,
        fits,
    })
}

fn fit_groups(axis: SweepAxis, rows: &[SweepRow]) -> Vec<AxisFit> {
    let fit_rows = |rs: &[&SweepRow]| {
        let pts: Vec<(f64, f64)> = rs.iter().map(|r| (r.phi0, r.backward)).collect();
        if pts.len() < MIN_FIT_POINTS {
            return Err(FitError::TooFewPoints {
                min: MIN_FIT_POINTS,
                got: pts.len(),
            });
        }
        fit_phase_response(&pts)
    };
    match axis {
        SweepAxis::Phi0 => {
            let all: Vec<&SweepRow> = rows.iter().collect();
            vec![AxisFit {
                axis_value: f64::NAN,
                fit: fit_rows(&all),
            }]
        }
        _ => group_values(rows)
            .into_iter()
            .map(|v| {
                let group: Vec<&SweepRow> = rows.iter().filter(|r| r.axis_value == v).collect();
                AxisFit {
                    axis_value: v,
                    fit: fit_rows(&group),
                }
            })
            .collect(),
    }
}

fn group_values(rows: &[SweepRow]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for r in rows {
        if out.last() != Some(&r.axis_value) {
            out.push(r.axis_value);
        }
    }
    out
}

impl SweepResult {
    /// Axis values in row order, without repeats.
    pub fn axis_values(&self) -> Vec<f64> {
        group_values(&self.rows)
    }

    pub fn rows_for(&self, axis_value: f64) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.axis_value == axis_value)
    }

    /// Largest backward fraction over the `φ₀` rows of one axis value.
    pub fn peak_backward(&self, axis_value: f64) -> f64 {
        self.rows_for(axis_value)
            .map(|r| r.backward)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn fit_for(&self, axis_value: f64) -> Option<&Result<Fit, FitError>> {
        match self.axis {
            SweepAxis::Phi0 => self.fits.first().map(|f| &f.fit),
            _ => self
                .fits
                .iter()
                .find(|f| f.axis_value == axis_value)
                .map(|f| &f.fit),
        }
    }

    pub fn any_flagged(&self) -> bool {
        self.rows.iter().any(|r| r.flagged)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(96 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                self.axis.name(),
                r.axis_value,
                r.phi0,
                r.backward,
                r.forward,
                r.condensate,
                r.delta_phi01_mid,
                r.drift,
                r.flagged
            );
        }
        out
    }

    /// `key = value` fit report, one `[fit]` block per fit.
    pub fn fit_report(&self) -> String {
        let mut out = String::new();
        for f in &self.fits {
            out.push_str("[fit]\n");
            let _ = writeln!(out, "axis = {}", self.axis.name());
            if self.axis != SweepAxis::Phi0 {
                let _ = writeln!(out, "axis_value = {}", f.axis_value);
            }
            match &f.fit {
                Ok(fit) => {
                    let _ = writeln!(out, "amplitude = {}", fit.amplitude);
                    let _ = writeln!(out, "offset = {}", fit.offset);
                    let _ = writeln!(out, "baseline = {}", fit.baseline);
                    let _ = writeln!(out, "quality = {}", fit.quality);
                    let _ = writeln!(out, "maximizer = {}", fit.maximizer);
                    let _ = writeln!(out, "minimizer = {}", fit.minimizer);
                    let _ = writeln!(out, "degenerate = {}", fit.degenerate);
                    let _ = writeln!(out, "n_points = {}", fit.n_points);
                }
                Err(e) => {
                    let _ = writeln!(out, "error = {e}");
                }
            }
            out.push('\n');
        }
        out
    }

    /// `axis,axis_value,phi0,fitted` samples of each fitted curve.
    pub fn fitted_curve_csv(&self, samples: usize) -> String {
        let mut out = String::from("axis,axis_value,phi0,fitted\n");
        for f in &self.fits {
            if let Ok(fit) = &f.fit {
                for k in 0..=samples {
                    let phi = TAU * k as f64 / samples as f64;
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        self.axis.name(),
                        f.axis_value,
                        phi,
                        fit.evaluate(phi)
                    );
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_default_config, SpatialGrid};

    fn small_base() -> Config {
        let mut cfg = make_default_config::<f64>();
        cfg.grid = SpatialGrid::symmetric(1.2 * cfg.tf_half_length_xi, 64).unwrap();
        cfg.dtau = PI / 200.0;
        cfg
    }

    #[test]
    fn jobs_layout() {
        let mut spec = SweepSpec::new(small_base(), SweepAxis::Seed, vec![0.1, 1.0]);
        spec.phi0_grid = Phi0Grid::Uniform(4);
        let jobs = spec.jobs();
        assert_eq!(jobs.len(), 8);
        assert_eq!(jobs[0], (0.1, 0.0));
        assert_eq!(jobs[5], (1.0, PI / 2.0));

        let spec = SweepSpec::new(small_base(), SweepAxis::Phi0, vec![0.0, 1.0]);
        assert_eq!(spec.jobs(), vec![(0.0, 0.0), (1.0, 1.0)]);
    }

    #[test]
    fn experimental_grid() {
        let g = Phi0Grid::Experimental.values();
        assert_eq!(g.len(), 7);
        assert!((g[1] - 0.3 * PI).abs() < 1e-15);
        assert!(*g.last().unwrap() < TAU);
    }

    #[test]
    fn axis_mapping() {
        let base = small_base();
        let spec = SweepSpec::new(base, SweepAxis::Coupling, vec![1.0e6]);
        let c = spec.config_for(1.7e6, 0.5);
        assert!((c.pump.chi0 - base.pump.chi0 * (1.7f64 / 1.5).powi(2)).abs() < 1e-12);
        assert_eq!(c.pump.phi0, 0.5);
        let spec = SweepSpec::new(base, SweepAxis::Seed, vec![1.0]);
        let c = spec.config_for(10.0, 0.0);
        assert_eq!((c.seed_forward, c.seed_backward), (10.0, 10.0));
        let spec = SweepSpec::new(base, SweepAxis::Duration, vec![1.0]);
        assert_eq!(spec.config_for(2.0, 0.0).tau_end, 2.0);
    }

    #[test]
    fn invalid_specs() {
        let base = small_base();
        assert!(SweepSpec::new(base, SweepAxis::Phi0, vec![])
            .validate()
            .is_err());
        assert!(SweepSpec::new(base, SweepAxis::Phi0, vec![1.0, 0.5])
            .validate()
            .is_err());
        assert!(SweepSpec::new(base, SweepAxis::Phi0, vec![0.0, f64::NAN])
            .validate()
            .is_err());
        assert!(SweepSpec::new(base, SweepAxis::Phi0, vec![7.0])
            .validate()
            .is_err());
        assert!(SweepSpec::new(base, SweepAxis::Duration, vec![0.01])
            .validate()
            .is_err());
        let mut s = SweepSpec::new(base, SweepAxis::Phi0, vec![0.0]);
        s.parallelism = 0;
        assert!(s.validate().is_err());
        assert!("nonsense".parse::<SweepAxis>().is_err());
    }

    #[test]
    fn zero_seed_gives_zero_scattering() {
        let mut spec = SweepSpec::new(small_base(), SweepAxis::Seed, vec![0.0]);
        spec.phi0_grid = Phi0Grid::Uniform(6);
        spec.parallelism = 2;
        let res = run_sweep(&spec).unwrap();
        assert_eq!(res.rows.len(), 6);
        for r in &res.rows {
            assert_eq!(r.backward, 0.0);
            assert_eq!(r.forward, 0.0);
            assert!(r.delta_phi01_mid.is_nan());
        }
        let fit = res.fit_for(0.0).unwrap().as_ref().unwrap();
        assert!(fit.degenerate);
    }

    #[test]
    fn mirror_family_doubles_backward_only() {
        let mut spec = SweepSpec::new(small_base(), SweepAxis::Phi0, vec![0.0, PI / 2.0]);
        spec.parallelism = 1;
        let plain = run_sweep(&spec).unwrap();
        spec.mirror_family = true;
        let doubled = run_sweep(&spec).unwrap();
        for (a, b) in plain.rows.iter().zip(&doubled.rows) {
            assert_eq!(b.backward, 2.0 * a.backward);
            assert_eq!(b.forward, a.forward);
        }
        assert!(plain.fits[0].fit.is_err());
    }

    #[test]
    fn csv_shape() {
        let mut spec = SweepSpec::new(small_base(), SweepAxis::Phi0, vec![0.0, 1.0, 2.0]);
        spec.parallelism = 3;
        let res = run_sweep(&spec).unwrap();
        let csv = res.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("phi0,0,0,"));
        for l in &lines[1..] {
            assert_eq!(l.split(',').count(), 9);
        }
    }
}
