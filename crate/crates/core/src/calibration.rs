//! Search for the reference coupling `chi0`.
//!
//! The backward fraction after one beat cycle grows monotonically with
//! `chi0` in the weak-pump regime, so a bisection on `ln chi0` converges.

use std::f64::consts::FRAC_PI_2;

use crate::solver::{simulate, SolverError};
use crate::Config;

/// Backward fraction the shipped `chi0` was tuned to.
pub const CALIBRATION_TARGET: f64 = 2e-3;
/// Acceptable backward fractions for the reference run.
pub const CALIBRATION_WINDOW: (f64, f64) = (1e-3, 1e-1);
/// Largest condensate depletion still counted as weak pumping.
pub const MAX_DEPLETION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub chi0: f64,
    pub backward: f64,
    pub forward: f64,
    pub depletion: f64,
    pub iterations: usize,
}

impl Calibration {
    pub fn in_window(&self) -> bool {
        self.backward >= CALIBRATION_WINDOW.0
            && self.backward <= CALIBRATION_WINDOW.1
            && self.depletion < MAX_DEPLETION
    }

    pub fn report(&self) -> String {
        format!(
            "[calibration]\nchi0 = {}\nbackward = {}\nforward = {}\ndepletion = {}\niterations = {}\nin_window = {}\n",
            self.chi0,
            self.backward,
            self.forward,
            self.depletion,
            self.iterations,
            self.in_window()
        )
    }
}

/// One-cycle run at `φ₀ = π/2` with the given coupling.
pub fn reference_run(
    base: &Config,
    chi0: f64,
    sample_every: usize,
) -> Result<Calibration, SolverError> {
    let mut cfg = *base;
    cfg.pump.chi0 = chi0;
    cfg.pump.phi0 = FRAC_PI_2;
    let traj = simulate(&cfg, sample_every)?;
    let [n00, n11, nm] = traj.final_populations();
    Ok(Calibration {
        chi0,
        backward: nm,
        forward: n11,
        depletion: 1.0 - n00,
        iterations: 0,
    })
}

/// Bisects `ln chi0` in `[lo, hi]` until the backward fraction is within
/// `rel_tol` of `target`.
pub fn calibrate_chi0(
    base: &Config,
    target: f64,
    (mut lo, mut hi): (f64, f64),
    rel_tol: f64,
    max_iter: usize,
) -> Result<Calibration, SolverError> {
    let mut it = 0;
    loop {
        it += 1;
        let mid = (lo * hi).sqrt();
        let run = reference_run(base, mid, usize::MAX)?;
        log::debug!("calibrate: chi0 = {mid}, backward = {}", run.backward);
        if ((run.backward - target) / target).abs() < rel_tol || it >= max_iter {
            return Ok(Calibration {
                iterations: it,
                ..run
            });
        }
        if run.backward < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}
