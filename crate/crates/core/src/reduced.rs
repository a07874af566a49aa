//! Closed-form baselines: the single-mode logistic growth model and the
//! sinusoidal phase law for the backward population.

use thiserror::Error;

use crate::scalar::Real;

/// Target `N_s(T) / N₀` used to pick the default logistic gain.
pub const DEFAULT_LOGISTIC_SATURATION: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LogisticError {
    #[error("logistic parameters out of range: {0}")]
    InvalidParams(&'static str),
}

/// `dN_s/dt = G(t) (N₀ - N_s) N_s` with `G(t) = gain_scale · (1 + cos(Δω t + φ₀))`.
///
/// Time is measured in pulse periods `T = 2π / Δω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams<T> {
    pub n0: T,
    pub gain_scale: T,
    pub ns0: T,
}

impl<T: Real> LogisticParams<T> {
    pub fn validate(&self) -> Result<(), LogisticError> {
        if !(self.n0 > T::one() && self.n0.is_finite()) {
            return Err(LogisticError::InvalidParams("n0 must be > 1"));
        }
        if !(self.gain_scale >= T::zero() && self.gain_scale.is_finite()) {
            return Err(LogisticError::InvalidParams("gain_scale must be >= 0"));
        }
        if !(self.ns0 >= T::one() && self.ns0 < self.n0) {
            return Err(LogisticError::InvalidParams("ns0 must lie in [1, n0)"));
        }
        Ok(())
    }

    /// One scattered atom to start, gain chosen so that a full cycle ends at
    /// `N_s / N₀ = 0.05`.
    pub fn with_default_gain(n0: T) -> Self {
        let ns0 = T::one();
        let target = T::lit(DEFAULT_LOGISTIC_SATURATION) * n0;
        // N₀/(1 + r e^{-N₀Λ}) = target with Λ(T) = gain_scale
        let r = (n0 - ns0) / ns0;
        let exponent = (r * target / (n0 - target)).ln();
        Self {
            n0,
            gain_scale: exponent / n0,
            ns0,
        }
    }
}

/// `∫₀^t (1 + cos(Δω t' + φ₀)) dt'` with `t` in periods, `Δω = 2π`.
pub fn pump_intensity_integral<T: Real>(phi0: T, t_over_t: T) -> T {
    let w = T::TAU();
    t_over_t + ((w * t_over_t + phi0).sin() - phi0.sin()) / w
}

/// Scattered atom count after `t_over_t` pulse periods.
///
/// Uses `N_s = N₀ / (1 + ((N₀ - N_s0)/N_s0) e^{-N₀ Λ})`, which reduces to
/// `N₀ e^{N₀Λ} / (N₀ - 1 + e^{N₀Λ})` for `N_s0 = 1` and saturates at `N₀`
/// instead of overflowing.
pub fn logistic_closed_form<T: Real>(
    p: &LogisticParams<T>,
    phi0: T,
    t_over_t: T,
) -> Result<T, LogisticError> {
    p.validate()?;
    let lambda = p.gain_scale * pump_intensity_integral(phi0, t_over_t);
    let r = (p.n0 - p.ns0) / p.ns0;
    Ok(p.n0 / (T::one() + r * (-p.n0 * lambda).exp()))
}

/// `-A cos(φ₀ + Δφ₀₁) + B`; with `Δφ₀₁ = π/2` this peaks at `φ₀ = π/2`.
pub fn eq6_prediction<T: Real>(amplitude: T, delta_phi01: T, baseline: T, phi0: T) -> T {
    -amplitude * (phi0 + delta_phi01).cos() + baseline
}

/// Phase-matched matter-wave phase difference.
pub fn phase_matched_delta<T: Real>() -> T {
    T::FRAC_PI_2()
}
