//! Three-mode Maxwell-Schrödinger evolution.
//!
//! The end-fire field is slaved to the matter-wave gratings: at each instant
//! it is the suffix integral
//!
//! ```text
//! S(ξ) = ∫_ξ^∞ dξ' [ψ₀₀ ψ₁₁* + ψ₋₁₋₁ ψ₀₀* e^{-2iτ}]
//! ```
//!
//! and with `χ(τ) = chi0 (1 + cos(2τ + φ₀))` the modes evolve as
//!
//! ```text
//! ∂τ ψ₁₁   = +χ S* ψ₀₀
//! ∂τ ψ₋₁₋₁ = -χ S  ψ₀₀ e^{+2iτ}
//! ∂τ ψ₀₀   = -χ S  ψ₁₁ + χ S* ψ₋₁₋₁ e^{-2iτ}
//! ```
//!
//! which conserves `Σ|ψ|²` pointwise in `ξ`.

use num_complex::Complex;
use thiserror::Error;

use crate::analysis::{grating_diagnostics, GratingDiagnostics};
use crate::model::{
    pump_beat, seeded_initial_state, ConfigError, ModeField, PumpConfig, SimConfig, SystemState,
};
use crate::scalar::Real;

/// Phase rate between adjacent diagonal modes, `4 ω_r` in `τ = 2 ω_r t` units.
pub const MODE_DETUNING: f64 = 2.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("non-finite field values after step ending at tau = {tau}")]
    NumericalBlowup { tau: f64 },
    #[error("dtau = {dtau} exceeds tau_end = {tau_end}")]
    StepTooLarge { dtau: f64, tau_end: f64 },
    #[error("sample_every must be >= 1")]
    ZeroSampleInterval,
}

/// Bare end-fire envelope `S(ξ)` at time `tau`. The physical `e₋` is a
/// constant multiple of it; that prefactor lives in `chi0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EndfireField<T> {
    pub tau: T,
    pub values: Vec<Complex<T>>,
}

/// `out[j] = ∫_{ξ_j}^{ξ_max} f dξ` by reverse cumulative trapezoid.
pub fn suffix_integral<T: Real>(f: &[Complex<T>], spacing: T) -> Vec<Complex<T>> {
    let n = f.len();
    let mut out = vec![Complex::new(T::zero(), T::zero()); n];
    let half = spacing * T::lit(0.5);
    for j in (0..n.saturating_sub(1)).rev() {
        out[j] = out[j + 1] + (f[j] + f[j + 1]) * half;
    }
    out
}

#[inline]
fn detuning_phase<T: Real>(tau: T) -> Complex<T> {
    Complex::from_polar(T::one(), T::lit(MODE_DETUNING) * tau)
}

/// Panics if the three fields do not share one grid.
pub fn compute_endfire<T: Real>(state: &SystemState<T>) -> EndfireField<T> {
    assert!(state.shares_grid(), "mode fields must share one grid");
    let back = detuning_phase(state.tau).conj();
    let integrand: Vec<Complex<T>> = state
        .psi00
        .values
        .iter()
        .zip(&state.psi11.values)
        .zip(&state.psim1m1.values)
        .map(|((&a, &f), &b)| a * f.conj() + b * a.conj() * back)
        .collect();
    EndfireField {
        tau: state.tau,
        values: suffix_integral(&integrand, state.grid().spacing()),
    }
}

/// `∂ψ/∂τ` for each of the three modes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDerivative<T> {
    pub d00: Vec<Complex<T>>,
    pub d11: Vec<Complex<T>>,
    pub dm1m1: Vec<Complex<T>>,
}

pub fn rhs<T: Real>(state: &SystemState<T>, pump: &PumpConfig<T>) -> StateDerivative<T> {
    let s = compute_endfire(state);
    let chi = pump_beat(pump, state.tau);
    let fwd = detuning_phase(state.tau);
    let back = fwd.conj();
    let n = state.grid().n_points();
    let mut d = StateDerivative {
        d00: Vec::with_capacity(n),
        d11: Vec::with_capacity(n),
        dm1m1: Vec::with_capacity(n),
    };
    for j in 0..n {
        let a = state.psi00.values[j];
        let f = state.psi11.values[j];
        let b = state.psim1m1.values[j];
        let sj = s.values[j] * chi;
        let sj_c = s.values[j].conj() * chi;
        d.d11.push(sj_c * a);
        d.dm1m1.push(-(sj * a * fwd));
        d.d00.push(-(sj * f) + sj_c * b * back);
    }
    d
}

fn add_scaled<T: Real>(base: &ModeField<T>, k: &[Complex<T>], h: T) -> ModeField<T> {
    ModeField {
        label: base.label,
        grid: base.grid,
        values: base
            .values
            .iter()
            .zip(k)
            .map(|(&v, &dk)| v + dk * h)
            .collect(),
    }
}

fn stage<T: Real>(state: &SystemState<T>, k: &StateDerivative<T>, h: T) -> SystemState<T> {
    SystemState {
        tau: state.tau + h,
        psi00: add_scaled(&state.psi00, &k.d00, h),
        psi11: add_scaled(&state.psi11, &k.d11, h),
        psim1m1: add_scaled(&state.psim1m1, &k.dm1m1, h),
    }
}

fn combine<T: Real>(y: &ModeField<T>, ks: [&[Complex<T>]; 4], h: T) -> ModeField<T> {
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    let values = (0..y.values.len())
        .map(|j| y.values[j] + (ks[0][j] + ks[1][j] * two + ks[2][j] * two + ks[3][j]) * sixth)
        .collect();
    ModeField {
        label: y.label,
        grid: y.grid,
        values,
    }
}

/// One classical fourth-order Runge-Kutta step.
pub fn step_rk4<T: Real>(
    state: &SystemState<T>,
    pump: &PumpConfig<T>,
    dtau: T,
) -> Result<SystemState<T>, SolverError> {
    let half = dtau * T::lit(0.5);
    let k1 = rhs(state, pump);
    let k2 = rhs(&stage(state, &k1, half), pump);
    let k3 = rhs(&stage(state, &k2, half), pump);
    let k4 = rhs(&stage(state, &k3, dtau), pump);
    let next = SystemState {
        tau: state.tau + dtau,
        psi00: combine(&state.psi00, [&k1.d00, &k2.d00, &k3.d00, &k4.d00], dtau),
        psi11: combine(&state.psi11, [&k1.d11, &k2.d11, &k3.d11, &k4.d11], dtau),
        psim1m1: combine(
            &state.psim1m1,
            [&k1.dm1m1, &k2.dm1m1, &k3.dm1m1, &k4.dm1m1],
            dtau,
        ),
    };
    if !next.is_finite() {
        return Err(SolverError::NumericalBlowup {
            tau: next.tau.to_f64_lossy(),
        });
    }
    Ok(next)
}

/// Sampled history of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub taus: Vec<T>,
    /// `(N₀₀, N₁₁, N₋₁₋₁)` per sample.
    pub populations: Vec<[T; 3]>,
    pub diagnostics: Vec<GratingDiagnostics<T>>,
    pub snapshots: Vec<SystemState<T>>,
    pub initial_total: T,
    pub final_state: SystemState<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn totals(&self) -> impl Iterator<Item = T> + '_ {
        self.populations.iter().map(|p| p[0] + p[1] + p[2])
    }

    pub fn max_relative_drift(&self) -> T {
        self.totals()
            .map(|t| ((t - self.initial_total) / self.initial_total).abs())
            .fold(T::zero(), T::max)
    }

    pub fn final_populations(&self) -> [T; 3] {
        *self
            .populations
            .last()
            .expect("trajectory has at least one sample")
    }

    pub fn backward_fraction(&self) -> T {
        self.final_populations()[2]
    }

    /// Index of the sample closest to `tau`.
    pub fn nearest_sample(&self, tau: T) -> usize {
        let mut best = 0;
        for (i, &t) in self.taus.iter().enumerate() {
            if (t - tau).abs() < (self.taus[best] - tau).abs() {
                best = i;
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulateOptions {
    pub sample_every: usize,
    /// Keep a full copy of the state every this many steps (plus τ = 0).
    pub snapshot_every: Option<usize>,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        Self {
            sample_every: 10,
            snapshot_every: None,
        }
    }
}

pub fn simulate<T: Real>(
    cfg: &SimConfig<T>,
    sample_every: usize,
) -> Result<Trajectory<T>, SolverError> {
    simulate_with(
        cfg,
        &SimulateOptions {
            sample_every,
            snapshot_every: None,
        },
    )
}

/// Integrates `[0, tau_end]` with fixed RK4 steps no longer than `cfg.dtau`.
/// Samples at `τ = 0`, every `sample_every` steps, and at the final step.
pub fn simulate_with<T: Real>(
    cfg: &SimConfig<T>,
    opts: &SimulateOptions,
) -> Result<Trajectory<T>, SolverError> {
    if opts.sample_every == 0 {
        return Err(SolverError::ZeroSampleInterval);
    }
    if cfg.dtau > cfg.tau_end {
        return Err(SolverError::StepTooLarge {
            dtau: cfg.dtau.to_f64_lossy(),
            tau_end: cfg.tau_end.to_f64_lossy(),
        });
    }
    let mut state = seeded_initial_state(cfg)?;
    let (n_steps, h) = cfg.step_plan();
    let initial_total = state.total_norm();

    let mut traj = Trajectory {
        taus: Vec::new(),
        populations: Vec::new(),
        diagnostics: Vec::new(),
        snapshots: Vec::new(),
        initial_total,
        final_state: state.clone(),
    };
    let record = |traj: &mut Trajectory<T>, s: &SystemState<T>| {
        traj.taus.push(s.tau);
        traj.populations.push(s.populations());
        traj.diagnostics.push(grating_diagnostics(s));
    };
    record(&mut traj, &state);
    if opts.snapshot_every.is_some() {
        traj.snapshots.push(state.clone());
    }

    for step in 1..=n_steps {
        let mut next = step_rk4(&state, &cfg.pump, h)?;
        // accumulate τ without drift: the last step lands exactly on tau_end
        next.tau = if step == n_steps {
            cfg.tau_end
        } else {
            h * T::from_usize_lossy(step)
        };
        state = next;
        if step % opts.sample_every == 0 || step == n_steps {
            record(&mut traj, &state);
        }
        if let Some(k) = opts.snapshot_every {
            if k > 0 && (step % k == 0 || step == n_steps) {
                traj.snapshots.push(state.clone());
            }
        }
    }
    traj.final_state = state;
    Ok(traj)
}
