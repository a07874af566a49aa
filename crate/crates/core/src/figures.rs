//! Experiment presets and their artifact bundles.
//!
//! Each preset writes `<name>.csv`, `<name>_fit.txt`, `<name>_curve.csv` and
//! `<name>.svg` into the output directory.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analysis::fit_phase_response;
use crate::error::{create_dir, write_file, Error};
use crate::plot::{Plot, Series, Style};
use crate::reduced::{eq6_prediction, logistic_closed_form, phase_matched_delta, LogisticParams};
use crate::sweep::{run_sweep, Phi0Grid, SweepAxis, SweepResult, SweepSpec};
use crate::{Config, Traj};

/// Samples per fitted curve.
pub const CURVE_SAMPLES: usize = 180;

/// Partial-cycle duration shown by the logistic baseline.
pub const LOGISTIC_PARTIAL_CYCLE: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    LogisticBaseline,
    Eq6Overlay,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
        Preset::LogisticBaseline,
        Preset::Eq6Overlay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::LogisticBaseline => "logistic_baseline",
            Preset::Eq6Overlay => "eq6_overlay",
        }
    }

    /// Sweep axis of the preset; `None` for the closed-form baseline.
    pub fn axis(self) -> Option<SweepAxis> {
        match self {
            Preset::Fig4 | Preset::Eq6Overlay => Some(SweepAxis::Phi0),
            Preset::Fig5 => Some(SweepAxis::Coupling),
            Preset::Fig6 => Some(SweepAxis::Seed),
            Preset::Fig7 => Some(SweepAxis::Duration),
            Preset::LogisticBaseline => None,
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset {s:?}"))
    }
}

/// Knobs shared by all presets.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureOptions {
    pub base: Config,
    pub phi0_grid: Phi0Grid,
    /// Overrides the preset's axis values when set.
    pub values: Option<Vec<f64>>,
    pub parallelism: usize,
    pub sample_every: usize,
    pub mirror_family: bool,
}

impl FigureOptions {
    pub fn new(base: Config) -> Self {
        Self {
            base,
            phi0_grid: Phi0Grid::Uniform(16),
            values: None,
            parallelism: crate::sweep::default_parallelism(),
            sample_every: 10,
            mirror_family: false,
        }
    }

    pub fn spec(&self, axis: SweepAxis) -> SweepSpec {
        let values = match (&self.values, axis) {
            (Some(v), _) => v.clone(),
            (None, SweepAxis::Phi0) => self.phi0_grid.values(),
            (None, a) => a.default_values(),
        };
        SweepSpec {
            base: self.base,
            axis,
            values,
            phi0_grid: self.phi0_grid,
            parallelism: self.parallelism,
            sample_every: self.sample_every,
            mirror_family: self.mirror_family,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub report: PathBuf,
    pub curve: PathBuf,
    pub plot: PathBuf,
}

impl Artifacts {
    pub fn in_dir(out_dir: &Path, name: &str) -> Self {
        Self {
            csv: out_dir.join(format!("{name}.csv")),
            report: out_dir.join(format!("{name}_fit.txt")),
            curve: out_dir.join(format!("{name}_curve.csv")),
            plot: out_dir.join(format!("{name}.svg")),
        }
    }
}

pub fn run_figure(
    preset: Preset,
    opts: &FigureOptions,
    out_dir: &Path,
) -> Result<Artifacts, Error> {
    create_dir(out_dir)?;
    let art = Artifacts::in_dir(out_dir, preset.name());
    match preset {
        Preset::LogisticBaseline => write_logistic(opts, &art)?,
        Preset::Eq6Overlay => {
            let res = run_sweep(&opts.spec(SweepAxis::Phi0))?;
            write_eq6_overlay(&res, &art)?;
        }
        p => {
            let axis = p.axis().expect("sweep preset");
            let res = run_sweep(&opts.spec(axis))?;
            write_sweep_artifacts(&res, p.name(), &art)?;
        }
    }
    Ok(art)
}

fn axis_label(axis: SweepAxis, v: f64) -> String {
    match axis {
        SweepAxis::Phi0 => "simulated".into(),
        SweepAxis::Coupling => format!("g = {:.2}e6", v / 1e6),
        SweepAxis::Seed => format!("seed = {v}"),
        SweepAxis::Duration => format!("tau_end = {:.3}pi", v / std::f64::consts::PI),
    }
}

/// Sweep CSV, fit report, fitted curves and the backward-fraction plot.
pub fn write_sweep_artifacts(res: &SweepResult, title: &str, art: &Artifacts) -> Result<(), Error> {
    write_file(&art.csv, &res.to_csv())?;
    write_file(&art.report, &res.fit_report())?;
    write_file(&art.curve, &res.fitted_curve_csv(CURVE_SAMPLES))?;
    write_file(&art.plot, &sweep_plot(res, title).to_svg())
}

fn sweep_plot(res: &SweepResult, title: &str) -> Plot {
    let mut series = Vec::new();
    for (i, v) in res.axis_values().into_iter().enumerate() {
        let group = if res.axis == SweepAxis::Phi0 {
            res.rows.iter().collect::<Vec<_>>()
        } else {
            res.rows_for(v).collect()
        };
        series.push(Series {
            label: axis_label(res.axis, v),
            points: group.iter().map(|r| (r.phi0, r.backward)).collect(),
            style: Style::Markers,
            color: i,
        });
        if let Some(Ok(fit)) = res.fit_for(v) {
            series.push(Series {
                label: String::new(),
                points: curve(|phi| fit.evaluate(phi)),
                style: Style::Line,
                color: i,
            });
        }
        if res.axis == SweepAxis::Phi0 {
            break;
        }
    }
    Plot {
        title: title.into(),
        x_label: "phi0 [rad]".into(),
        y_label: "backward fraction".into(),
        series,
    }
}

fn curve(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    (0..=CURVE_SAMPLES)
        .map(|k| {
            let phi = TAU * k as f64 / CURVE_SAMPLES as f64;
            (phi, f(phi))
        })
        .collect()
}

/// Simulated `φ₀` sweep against its cosine fit and the phase-matched
/// sinusoid (`Δφ₀,₁ = π/2`) sharing the fitted amplitude and baseline.
pub fn write_eq6_overlay(res: &SweepResult, art: &Artifacts) -> Result<(), Error> {
    write_file(&art.csv, &res.to_csv())?;
    write_file(&art.report, &res.fit_report())?;
    let fit = match res.fit_for(f64::NAN) {
        Some(Ok(f)) => *f,
        _ => {
            write_file(&art.curve, "phi0,fitted,phase_matched\n")?;
            return write_file(&art.plot, &sweep_plot(res, "eq6_overlay").to_svg());
        }
    };
    let delta = phase_matched_delta::<f64>();
    let matched = |phi: f64| eq6_prediction(fit.amplitude, delta, fit.baseline, phi).max(0.0);
    let mut csv = String::from("phi0,fitted,phase_matched\n");
    for (phi, y) in curve(|p| fit.evaluate(p)) {
        let _ = writeln!(csv, "{phi},{y},{}", matched(phi));
    }
    write_file(&art.curve, &csv)?;
    let mut report = res.fit_report();
    let _ = writeln!(
        report,
        "[overlay]\nphase_matched_delta = {delta}\nfitted_delta = {}\ndelta_error = {}",
        fit.offset,
        crate::scalar::circular_distance(fit.offset, delta)
    );
    write_file(&art.report, &report)?;
    let mut plot = sweep_plot(res, "eq6_overlay");
    plot.series.push(Series {
        label: "phase matched".into(),
        points: curve(matched),
        style: Style::Dashed,
        color: 1,
    });
    write_file(&art.plot, &plot.to_svg())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRow {
    pub phi0: f64,
    pub full_cycle: f64,
    pub partial_cycle: f64,
}

/// Closed-form logistic scattered fractions over the `φ₀` grid.
pub fn logistic_rows(opts: &FigureOptions) -> Result<Vec<LogisticRow>, Error> {
    let params = LogisticParams::with_default_gain(opts.base.total_atoms);
    let n0 = params.n0;
    opts.phi0_grid
        .values()
        .into_iter()
        .map(|phi0| {
            Ok(LogisticRow {
                phi0,
                full_cycle: logistic_closed_form(&params, phi0, 1.0)? / n0,
                partial_cycle: logistic_closed_form(&params, phi0, LOGISTIC_PARTIAL_CYCLE)? / n0,
            })
        })
        .collect()
}

fn write_logistic(opts: &FigureOptions, art: &Artifacts) -> Result<(), Error> {
    let rows = logistic_rows(opts)?;
    let mut csv = String::from("phi0,backward_proxy,partial_cycle\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{},{}", r.phi0, r.full_cycle, r.partial_cycle);
    }
    write_file(&art.csv, &csv)?;

    let full: Vec<f64> = rows.iter().map(|r| r.full_cycle).collect();
    let spread = full.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - full.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut report = format!(
        "[logistic]\nfull_cycle = {}\nfull_cycle_relative_spread = {}\npartial_cycle = {}\n\n",
        full[0],
        spread / full[0],
        LOGISTIC_PARTIAL_CYCLE
    );
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.phi0, r.partial_cycle)).collect();
    let fit = fit_phase_response(&pts);
    let mut curve_csv = String::from("phi0,partial_cycle_fitted\n");
    match &fit {
        Ok(f) => {
            let _ = writeln!(
                report,
                "[fit]\naxis = partial_cycle\namplitude = {}\noffset = {}\nbaseline = {}\nquality = {}\nmaximizer = {}\nminimizer = {}",
                f.amplitude, f.offset, f.baseline, f.quality, f.maximizer, f.minimizer
            );
            for (phi, y) in curve(|p| f.evaluate(p)) {
                let _ = writeln!(curve_csv, "{phi},{y}");
            }
        }
        Err(e) => {
            let _ = writeln!(report, "[fit]\naxis = partial_cycle\nerror = {e}");
        }
    }
    write_file(&art.report, &report)?;
    write_file(&art.curve, &curve_csv)?;

    let plot = Plot {
        title: "logistic_baseline".into(),
        x_label: "phi0 [rad]".into(),
        y_label: "scattered fraction".into(),
        series: vec![
            Series {
                label: "full cycle".into(),
                points: rows.iter().map(|r| (r.phi0, r.full_cycle)).collect(),
                style: Style::Line,
                color: 0,
            },
            Series {
                label: "1/3 cycle".into(),
                points: rows.iter().map(|r| (r.phi0, r.partial_cycle)).collect(),
                style: Style::Line,
                color: 1,
            },
        ],
    };
    write_file(&art.plot, &plot.to_svg())
}

pub const TRAJECTORY_HEADER: &str = "tau,N00,N11,Nm1m1,total,C01_abs,C01_arg,Cm10_abs,delta_phi01";

/// One row per trajectory sample; populations are atom fractions.
pub fn trajectory_csv(traj: &Traj) -> String {
    let mut out = String::with_capacity(128 * (traj.taus.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for ((tau, [n00, n11, nm]), d) in traj
        .taus
        .iter()
        .zip(&traj.populations)
        .zip(&traj.diagnostics)
    {
        let dphi = if d.valid { d.delta_phi01 } else { f64::NAN };
        let _ = writeln!(
            out,
            "{tau},{n00},{n11},{nm},{},{},{},{},{dphi}",
            n00 + n11 + nm,
            d.c01.norm(),
            d.c01.arg(),
            d.cm10.norm()
        );
    }
    out
}
