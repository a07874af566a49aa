//! Domain types, dimensionless units, initial conditions and the pump beat.
//!
//! Lengths are measured in `ξ = k_l z` and time in `τ = 2 ω_r t`. Mode
//! norms are atom fractions: the condensate starts at norm 1 and a seed of
//! `s` atoms out of `N` starts at norm `s / N`.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;

/// Pump wavelength (Rb D2 line), metres.
pub const PUMP_WAVELENGTH_M: f64 = 780e-9;
/// Axial Thomas-Fermi radius of the condensate, metres.
pub const TF_RADIUS_AXIAL_M: f64 = 50e-6;
/// Radial Thomas-Fermi radius, metres. Only the axial one enters the 1-D model.
pub const TF_RADIUS_RADIAL_M: f64 = 5e-6;
/// Atoms in the condensate.
pub const DEFAULT_TOTAL_ATOMS: f64 = 2.0e5;
/// Beat frequency in `τ` units: `Δω = 4 ω_r` gives a beat of `2τ`.
pub const RESONANT_BEAT_MULTIPLIER: f64 = 2.0;
/// Grid half-width relative to the Thomas-Fermi half-length.
pub const GRID_MARGIN: f64 = 1.2;
pub const DEFAULT_GRID_POINTS: usize = 512;
/// Time steps per beat cycle (`τ ∈ [0, π]`).
pub const DEFAULT_STEPS_PER_CYCLE: usize = 2000;
/// Coupling `g` that the reference `chi0` corresponds to.
pub const REFERENCE_COUPLING_G: f64 = 1.5e6;
/// Calibrated dimensionless coupling for `g = 1.5×10⁶`.
///
/// Produced by `superrad calibrate` on the default scenario: a one-cycle,
/// one-atom-seed run at `φ₀ = π/2` ends with a backward fraction of 2×10⁻³
/// and about 1% condensate depletion.
pub const CHI0_REF: f64 = 4.44;
/// Seed fractions above this trigger a warning.
pub const SEED_FRACTION_WARN: f64 = 1e-2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("{field} = {value} out of range: {reason}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
}

fn out_of_range(field: &'static str, value: f64, reason: &'static str) -> ConfigError {
    ConfigError::OutOfRange {
        field,
        value,
        reason,
    }
}

/// Uniform 1-D grid in `ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid<T> {
    xi_min: T,
    xi_max: T,
    n_points: usize,
}

impl<T: Real> SpatialGrid<T> {
    pub const MIN_POINTS: usize = 16;

    pub fn new(xi_min: T, xi_max: T, n_points: usize) -> Result<Self, ConfigError> {
        if !(xi_min.is_finite() && xi_max.is_finite()) || xi_min >= xi_max {
            return Err(ConfigError::InvalidGrid(format!(
                "need finite xi_min < xi_max, got [{xi_min}, {xi_max}]"
            )));
        }
        if n_points < Self::MIN_POINTS {
            return Err(ConfigError::InvalidGrid(format!(
                "n_points = {n_points} < {}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self {
            xi_min,
            xi_max,
            n_points,
        })
    }

    pub fn symmetric(xi_max: T, n_points: usize) -> Result<Self, ConfigError> {
        Self::new(-xi_max, xi_max, n_points)
    }

    pub fn xi_min(&self) -> T {
        self.xi_min
    }

    pub fn xi_max(&self) -> T {
        self.xi_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> T {
        (self.xi_max - self.xi_min) / T::from_usize_lossy(self.n_points - 1)
    }

    pub fn point(&self, j: usize) -> T {
        self.xi_min + T::from_usize_lossy(j) * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_points).map(move |j| self.point(j))
    }
}

/// Atomic side mode `(n, m)` of the simulated diagonal family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeLabel {
    /// `(0, 0)`, the condensate at rest.
    Condensate,
    /// `(1, 1)`
    Forward,
    /// `(-1, -1)`
    Backward,
}

impl ModeLabel {
    pub fn indices(self) -> (i32, i32) {
        match self {
            ModeLabel::Condensate => (0, 0),
            ModeLabel::Forward => (1, 1),
            ModeLabel::Backward => (-1, -1),
        }
    }
}

/// Complex envelope of one side mode on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeField<T> {
    pub label: ModeLabel,
    pub grid: SpatialGrid<T>,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> ModeField<T> {
    pub fn zeros(label: ModeLabel, grid: SpatialGrid<T>) -> Self {
        Self {
            label,
            grid,
            values: vec![Complex::new(T::zero(), T::zero()); grid.n_points()],
        }
    }

    /// Panics if `values.len()` differs from the grid size.
    pub fn from_values(label: ModeLabel, grid: SpatialGrid<T>, values: Vec<Complex<T>>) -> Self {
        assert_eq!(
            values.len(),
            grid.n_points(),
            "mode field length does not match grid"
        );
        Self {
            label,
            grid,
            values,
        }
    }

    /// `Σ |ψ_j|² Δξ`
    pub fn norm(&self) -> T {
        self.values.iter().map(|v| v.norm_sqr()).sum::<T>() * self.grid.spacing()
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Copy of this field with a new label, rescaled to the requested norm
    /// and multiplied by `e^{i phase}`. A zero field stays zero.
    pub fn rescaled(&self, label: ModeLabel, target_norm: T, phase: T) -> Self {
        let current = self.norm();
        let factor = if current > T::zero() {
            (target_norm / current).sqrt()
        } else {
            T::zero()
        };
        let rot = Complex::from_polar(factor, phase);
        Self {
            label,
            grid: self.grid,
            values: self.values.iter().map(|v| v * rot).collect(),
        }
    }
}

/// The three mode envelopes at one instant `τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState<T> {
    pub tau: T,
    pub psi00: ModeField<T>,
    pub psi11: ModeField<T>,
    pub psim1m1: ModeField<T>,
}

impl<T: Real> SystemState<T> {
    pub fn grid(&self) -> SpatialGrid<T> {
        self.psi00.grid
    }

    pub fn shares_grid(&self) -> bool {
        let g = self.psi00.grid;
        self.psi11.grid == g
            && self.psim1m1.grid == g
            && self.psi00.values.len() == g.n_points()
            && self.psi11.values.len() == g.n_points()
            && self.psim1m1.values.len() == g.n_points()
    }

    pub fn total_norm(&self) -> T {
        self.psi00.norm() + self.psi11.norm() + self.psim1m1.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.psi00.is_finite() && self.psi11.is_finite() && self.psim1m1.is_finite()
    }

    /// `(N₀₀, N₁₁, N₋₁₋₁)`
    pub fn populations(&self) -> [T; 3] {
        [self.psi00.norm(), self.psi11.norm(), self.psim1m1.norm()]
    }
}

/// Two-frequency pump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpConfig<T> {
    /// Dimensionless effective coupling; scales as `g²`.
    pub chi0: T,
    /// Initial relative phase of the two frequency components, radians.
    pub phi0: T,
    pub beat_multiplier: T,
}

impl<T: Real> PumpConfig<T> {
    pub fn new(chi0: T, phi0: T) -> Self {
        Self {
            chi0,
            phi0,
            beat_multiplier: T::lit(RESONANT_BEAT_MULTIPLIER),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.chi0.is_finite() && self.chi0 >= T::zero()) {
            return Err(out_of_range(
                "pump.chi0",
                self.chi0.to_f64_lossy(),
                "must be >= 0",
            ));
        }
        if !(self.phi0 >= T::zero() && self.phi0 < T::TAU()) {
            return Err(out_of_range(
                "pump.phi0",
                self.phi0.to_f64_lossy(),
                "must lie in [0, 2*pi)",
            ));
        }
        if !(self.beat_multiplier.is_finite() && self.beat_multiplier > T::zero()) {
            return Err(out_of_range(
                "pump.beat_multiplier",
                self.beat_multiplier.to_f64_lossy(),
                "must be > 0",
            ));
        }
        Ok(())
    }
}

/// Coupling `chi0` that corresponds to the coupling factor `g`, scaled from
/// the reference as `g²`.
pub fn chi0_for_coupling<T: Real>(chi0_ref: T, g: T) -> T {
    let r = g / T::lit(REFERENCE_COUPLING_G);
    chi0_ref * r * r
}

/// Beat-modulated coupling `χ(τ) = chi0 (1 + cos(2τ + φ₀))`.
#[inline]
pub fn pump_beat<T: Real>(pump: &PumpConfig<T>, tau: T) -> T {
    pump.chi0 * (T::one() + (pump.beat_multiplier * tau + pump.phi0).cos())
}

/// All physical and numerical parameters of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig<T> {
    pub grid: SpatialGrid<T>,
    pub pump: PumpConfig<T>,
    /// Seed of mode (1,1), atoms.
    pub seed_forward: T,
    /// Seed of mode (-1,-1), atoms.
    pub seed_backward: T,
    pub seed_phase_forward: T,
    pub seed_phase_backward: T,
    pub total_atoms: T,
    pub tau_end: T,
    pub dtau: T,
    pub tf_half_length_xi: T,
}

impl<T: Real> SimConfig<T> {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.pump.validate()?;
        let f = |x: T| x.to_f64_lossy();
        if !(self.total_atoms.is_finite() && self.total_atoms > T::zero()) {
            return Err(out_of_range(
                "model.total_atoms",
                f(self.total_atoms),
                "must be > 0",
            ));
        }
        for (name, seed) in [
            ("seed.forward", self.seed_forward),
            ("seed.backward", self.seed_backward),
        ] {
            if !(seed.is_finite() && seed >= T::zero()) {
                return Err(out_of_range(name, f(seed), "must be >= 0"));
            }
        }
        for (name, ph) in [
            ("seed.phase_forward", self.seed_phase_forward),
            ("seed.phase_backward", self.seed_phase_backward),
        ] {
            if !ph.is_finite() {
                return Err(out_of_range(name, f(ph), "must be finite"));
            }
        }
        if !(self.tau_end.is_finite() && self.tau_end > T::zero()) {
            return Err(out_of_range("time.tau_end", f(self.tau_end), "must be > 0"));
        }
        if !(self.dtau.is_finite() && self.dtau > T::zero()) {
            return Err(out_of_range("time.dtau", f(self.dtau), "must be > 0"));
        }
        // small slack for values like π/2000 against (π/3)/100
        if self.dtau > self.tau_end / T::lit(100.0) * T::lit(1.0 + 1e-9) {
            return Err(out_of_range(
                "time.dtau",
                f(self.dtau),
                "must be <= tau_end / 100",
            ));
        }
        let half = self.tf_half_length_xi;
        if !(half.is_finite()
            && half > T::zero()
            && half <= self.grid.xi_max()
            && -half >= self.grid.xi_min())
        {
            return Err(out_of_range(
                "model.tf_half_length_xi",
                f(half),
                "must be > 0 and inside the grid",
            ));
        }
        Ok(())
    }

    /// Non-fatal configuration concerns.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, seed) in [
            ("forward", self.seed_forward),
            ("backward", self.seed_backward),
        ] {
            let frac = seed / self.total_atoms;
            if frac > T::lit(SEED_FRACTION_WARN) {
                out.push(format!(
                    "{name} seed fraction {frac} exceeds {SEED_FRACTION_WARN}; the seed no longer models a small perturbation"
                ));
            }
        }
        out
    }

    /// Number of fixed steps and the effective step length that lands exactly
    /// on `tau_end` without exceeding `dtau`.
    pub fn step_plan(&self) -> (usize, T) {
        let ratio = (self.tau_end / self.dtau).to_f64_lossy();
        let nearest = ratio.round();
        let n = if (ratio - nearest).abs() < 1e-6 * nearest.max(1.0) {
            nearest
        } else {
            ratio.ceil()
        };
        let n = (n as usize).max(1);
        (n, self.tau_end / T::from_usize_lossy(n))
    }
}

/// `k_l × 50 µm` with `k_l = 2π / 780 nm`.
pub fn default_tf_half_length<T: Real>() -> T {
    T::TAU() / T::lit(PUMP_WAVELENGTH_M) * T::lit(TF_RADIUS_AXIAL_M)
}

/// The experimental scenario: one full beat cycle, one-atom seeds, `φ₀ = 0`.
pub fn make_default_config<T: Real>() -> SimConfig<T> {
    let tf = default_tf_half_length::<T>();
    let grid = SpatialGrid::symmetric(T::lit(GRID_MARGIN) * tf, DEFAULT_GRID_POINTS)
        .expect("default grid is valid");
    let tau_end = T::PI();
    SimConfig {
        grid,
        pump: PumpConfig::new(T::lit(CHI0_REF), T::zero()),
        seed_forward: T::one(),
        seed_backward: T::one(),
        seed_phase_forward: T::zero(),
        seed_phase_backward: T::zero(),
        total_atoms: T::lit(DEFAULT_TOTAL_ATOMS),
        tau_end,
        dtau: tau_end / T::from_usize_lossy(DEFAULT_STEPS_PER_CYCLE),
        tf_half_length_xi: tf,
    }
}

/// Unnormalized inverted-parabola amplitude `sqrt(max(0, 1 - (ξ/R)²))`.
pub(crate) fn tf_amplitude<T: Real>(xi: T, half_length: T) -> T {
    let r = xi / half_length;
    (T::one() - r * r).max(T::zero()).sqrt()
}

/// Condensate envelope with inverted-parabola density, real and normalized
/// to unit discrete norm.
pub fn thomas_fermi_profile<T: Real>(
    grid: SpatialGrid<T>,
    half_length: T,
) -> Result<ModeField<T>, ConfigError> {
    if !(half_length > T::zero() && half_length <= grid.xi_max() && -half_length >= grid.xi_min()) {
        return Err(out_of_range(
            "model.tf_half_length_xi",
            half_length.to_f64_lossy(),
            "must be > 0 and inside the grid",
        ));
    }
    let values: Vec<Complex<T>> = grid
        .points()
        .map(|xi| Complex::new(tf_amplitude(xi, half_length), T::zero()))
        .collect();
    let field = ModeField::from_values(ModeLabel::Condensate, grid, values);
    if field.norm() <= T::zero() {
        return Err(ConfigError::InvalidGrid(
            "Thomas-Fermi support contains no grid points".into(),
        ));
    }
    Ok(field.rescaled(ModeLabel::Condensate, T::one(), T::zero()))
}

/// Condensate plus same-shaped side-mode seeds at `τ = 0`.
pub fn seeded_initial_state<T: Real>(cfg: &SimConfig<T>) -> Result<SystemState<T>, ConfigError> {
    cfg.validate()?;
    let psi00 = thomas_fermi_profile(cfg.grid, cfg.tf_half_length_xi)?;
    let psi11 = psi00.rescaled(
        ModeLabel::Forward,
        cfg.seed_forward / cfg.total_atoms,
        cfg.seed_phase_forward,
    );
    let psim1m1 = psi00.rescaled(
        ModeLabel::Backward,
        cfg.seed_backward / cfg.total_atoms,
        cfg.seed_phase_backward,
    );
    Ok(SystemState {
        tau: T::zero(),
        psi00,
        psi11,
        psim1m1,
    })
}
