//! Observables extracted from states and trajectories: populations, grating
//! correlators, the backward-mode rate and the cosine fit of a phase sweep.

use num_complex::Complex;
use thiserror::Error;

use crate::model::{pump_beat, ModeField, PumpConfig, SystemState};
use crate::scalar::{wrap_pi, wrap_two_pi, Real};
use crate::solver::{suffix_integral, MODE_DETUNING};

/// Atom fraction held by one mode.
pub fn population<T: Real>(field: &ModeField<T>) -> T {
    field.norm()
}

/// Grating correlators at one instant.
///
/// `c01 = ∫dξ ψ₀₀ψ₋₁₋₁* ∫_ξ^∞ ψ₀₀ψ₁₁*` and
/// `cm10 = ∫dξ ψ₀₀ψ₋₁₋₁* ∫_ξ^∞ ψ₋₁₋₁ψ₀₀*`. With `C = |C| e^{-iΔφ}`,
/// `delta_phi01 = -arg(c01)` in `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingDiagnostics<T> {
    pub tau: T,
    pub c01: Complex<T>,
    pub cm10: Complex<T>,
    pub delta_phi01: T,
    /// False when `c01 == 0`, where the phase is undefined and reported as 0.
    pub valid: bool,
}

pub fn grating_diagnostics<T: Real>(state: &SystemState<T>) -> GratingDiagnostics<T> {
    assert!(state.shares_grid(), "mode fields must share one grid");
    let h = state.grid().spacing();
    let a = &state.psi00.values;
    let f = &state.psi11.values;
    let b = &state.psim1m1.values;

    let forward_grating: Vec<Complex<T>> = a.iter().zip(f).map(|(a, f)| a * f.conj()).collect();
    let backward_grating: Vec<Complex<T>> = b.iter().zip(a).map(|(b, a)| b * a.conj()).collect();
    let suf_f = suffix_integral(&forward_grating, h);
    let suf_b = suffix_integral(&backward_grating, h);

    let zero = Complex::new(T::zero(), T::zero());
    let (mut c01, mut cm10) = (zero, zero);
    for j in 0..a.len() {
        // ψ₀₀ ψ₋₁₋₁*
        let w = backward_grating[j].conj();
        c01 += w * suf_f[j];
        cm10 += w * suf_b[j];
    }
    c01 *= h;
    cm10 *= h;

    let valid = c01.norm() > T::min_positive_value();
    let delta_phi01 = if valid {
        wrap_pi(-c01.arg())
    } else {
        T::zero()
    };
    GratingDiagnostics {
        tau: state.tau,
        c01,
        cm10,
        delta_phi01,
        valid,
    }
}

/// `dN₋₁₋₁/dτ = -2 χ(τ) Re[C₀₁ e^{2iτ} + C₋₁₀]` from precomputed correlators.
pub fn backward_rate_from_diagnostics<T: Real>(
    diag: &GratingDiagnostics<T>,
    pump: &PumpConfig<T>,
) -> T {
    let chi = pump_beat(pump, diag.tau);
    let rot = Complex::from_polar(T::one(), T::lit(MODE_DETUNING) * diag.tau);
    -(chi * T::lit(2.0) * (diag.c01 * rot + diag.cm10).re)
}

pub fn backward_rate_eq4<T: Real>(state: &SystemState<T>, pump: &PumpConfig<T>) -> T {
    backward_rate_from_diagnostics(&grating_diagnostics(state), pump)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("phases cover only {covered:.4} rad; a full period (2*pi) is required")]
    InsufficientCoverage { covered: f64 },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("singular normal equations")]
    Singular,
}

/// Least-squares fit of `y = -A cos(φ₀ + δ) + B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFit<T> {
    pub amplitude: T,
    /// `δ` in `(-π, π]`.
    pub offset: T,
    pub baseline: T,
    /// Coefficient of determination. Zero for degenerate (constant) data.
    pub quality: T,
    /// Ordinates were all equal; amplitude is 0 and the phases are meaningless.
    pub degenerate: bool,
    pub maximizer: T,
    pub minimizer: T,
    pub n_points: usize,
}

impl<T: Real> PhaseFit<T> {
    pub fn evaluate(&self, phi0: T) -> T {
        crate::reduced::eq6_prediction(self.amplitude, self.offset, self.baseline, phi0)
    }
}

pub const MIN_FIT_POINTS: usize = 6;

fn solve3<T: Real>(mut m: [[T; 3]; 3], mut rhs: [T; 3]) -> Option<[T; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[pivot][col].abs() <= T::epsilon() * T::lit(1e-3) {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..3 {
            let factor = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (v, p) in m[row].iter_mut().zip(pivot_row).skip(col) {
                *v -= factor * p;
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut acc = rhs[row];
        for k in row + 1..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Fits `(φ₀, y)` samples through the linear form `y = p cos φ₀ + q sin φ₀ + B`.
///
/// The samples must number at least six and cover a full period: with the
/// phases wrapped into `[0, 2π)` and each point standing for one mean spacing,
/// `(max - min) · n / (n - 1) ≥ 2π`.
pub fn fit_phase_response<T: Real>(points: &[(T, T)]) -> Result<PhaseFit<T>, FitError> {
    let n = points.len();
    if n < MIN_FIT_POINTS {
        return Err(FitError::TooFewPoints {
            min: MIN_FIT_POINTS,
            got: n,
        });
    }
    if let Some(i) = points
        .iter()
        .position(|(x, y)| !(x.is_finite() && y.is_finite()))
    {
        return Err(FitError::NonFinite(i));
    }
    let wrapped: Vec<T> = points.iter().map(|&(x, _)| wrap_two_pi(x)).collect();
    let lo = wrapped.iter().copied().fold(T::infinity(), T::min);
    let hi = wrapped.iter().copied().fold(T::neg_infinity(), T::max);
    let nf = T::from_usize_lossy(n);
    let covered = (hi - lo) * nf / (nf - T::one());
    if covered < T::TAU() * (T::one() - T::lit(1e-9)) {
        return Err(FitError::InsufficientCoverage {
            covered: covered.to_f64_lossy(),
        });
    }

    let mean = points.iter().map(|p| p.1).sum::<T>() / nf;
    let ss_tot = points
        .iter()
        .map(|p| (p.1 - mean) * (p.1 - mean))
        .sum::<T>();
    let y_scale = points.iter().map(|p| p.1.abs()).fold(T::zero(), T::max);
    if ss_tot <= (T::epsilon() * y_scale) * (T::epsilon() * y_scale) * nf {
        return Ok(PhaseFit {
            amplitude: T::zero(),
            offset: T::zero(),
            baseline: mean,
            quality: T::zero(),
            degenerate: true,
            maximizer: T::zero(),
            minimizer: T::zero(),
            n_points: n,
        });
    }

    let mut ata = [[T::zero(); 3]; 3];
    let mut aty = [T::zero(); 3];
    for &(phi, y) in points {
        let row = [phi.cos(), phi.sin(), T::one()];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            aty[i] += row[i] * y;
        }
    }
    let [p, q, baseline] = solve3(ata, aty).ok_or(FitError::Singular)?;

    let ss_res = points
        .iter()
        .map(|&(phi, y)| {
            let r = y - (p * phi.cos() + q * phi.sin() + baseline);
            r * r
        })
        .sum::<T>();

    // p = -A cos δ, q = A sin δ
    let amplitude = p.hypot(q);
    let offset = wrap_pi(q.atan2(-p));
    Ok(PhaseFit {
        amplitude,
        offset,
        baseline,
        quality: T::one() - ss_res / ss_tot,
        degenerate: false,
        maximizer: wrap_two_pi(T::PI() - offset),
        minimizer: wrap_two_pi(T::TAU() - offset),
        n_points: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_default_config, seeded_initial_state, ModeLabel, SpatialGrid};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn uniform_phases(n: usize) -> Vec<f64> {
        (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
    }

    fn random_state(seed: u64) -> SystemState<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let grid = SpatialGrid::symmetric(3.0, 48).unwrap();
        let mut field = |label| {
            let v = (0..48)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            ModeField::from_values(label, grid, v)
        };
        SystemState {
            tau: 0.7,
            psi00: field(ModeLabel::Condensate),
            psi11: field(ModeLabel::Forward),
            psim1m1: field(ModeLabel::Backward),
        }
    }

    fn rotate(f: &ModeField<f64>, a: f64) -> ModeField<f64> {
        let r = Complex::from_polar(1.0, a);
        ModeField {
            values: f.values.iter().map(|v| v * r).collect(),
            ..f.clone()
        }
    }

    #[test]
    fn population_basics() {
        let cfg = make_default_config::<f64>();
        let st = seeded_initial_state(&cfg).unwrap();
        assert!((population(&st.psi00) - 1.0).abs() < 1e-12);
        assert!((population(&st.psi11) - 5e-6).abs() < 1e-15);
        assert_eq!(
            population(&ModeField::<f64>::zeros(ModeLabel::Forward, cfg.grid)),
            0.0
        );
    }

    #[test]
    fn diagnostics_with_zero_mode_are_flagged() {
        let mut cfg = make_default_config::<f64>();
        cfg.seed_forward = 0.0;
        let st = seeded_initial_state(&cfg).unwrap();
        let d = grating_diagnostics(&st);
        assert_eq!(d.c01, Complex::new(0.0, 0.0));
        assert!(!d.valid);
        assert_eq!(d.delta_phi01, 0.0);
        assert_eq!(
            backward_rate_eq4(&st, &cfg.pump),
            backward_rate_from_diagnostics(&d, &cfg.pump)
        );
    }

    #[test]
    fn real_fields_have_zero_phase() {
        let cfg = make_default_config::<f64>();
        let st = seeded_initial_state(&cfg).unwrap();
        let d = grating_diagnostics(&st);
        assert!(d.valid);
        assert_eq!(d.delta_phi01, 0.0);
        assert!(d.c01.re > 0.0);
    }

    #[test]
    fn rate_vanishes_at_pump_node_and_without_seeds() {
        let st = random_state(2);
        assert!(backward_rate_eq4(&st, &PumpConfig::new(2.0, PI - 2.0 * 0.7)).abs() < 1e-12);
        let mut cfg = make_default_config::<f64>();
        cfg.seed_backward = 0.0;
        cfg.seed_forward = 0.0;
        let st = seeded_initial_state(&cfg).unwrap();
        assert_eq!(backward_rate_eq4(&st, &cfg.pump), 0.0);
    }

    #[test]
    fn rate_equals_solver_norm_derivative() {
        let st = random_state(9);
        let pump = PumpConfig::new(1.3, 0.4);
        let d = crate::solver::rhs(&st, &pump);
        let h = st.grid().spacing();
        let from_rhs: f64 = d
            .dm1m1
            .iter()
            .zip(&st.psim1m1.values)
            .map(|(dv, v)| 2.0 * (dv * v.conj()).re)
            .sum::<f64>()
            * h;
        let eq4 = backward_rate_eq4(&st, &pump);
        assert!(
            (from_rhs - eq4).abs() < 1e-12 * eq4.abs().max(1.0),
            "{from_rhs} {eq4}"
        );
    }

    /// Term-by-term trigonometric expansion of the rate with
    /// `C₀₁ = |C₀₁| e^{-iΔφ}` and a real `C₋₁₀`.
    fn rate_expanded(c01: f64, dphi: f64, cm10: f64, chi0: f64, phi0: f64, tau: f64) -> f64 {
        -chi0
            * (c01
                * (2.0 * (2.0 * tau - dphi).cos()
                    + (phi0 + dphi).cos()
                    + (4.0 * tau + phi0 - dphi).cos())
                + 2.0 * cm10 * (1.0 + (2.0 * tau + phi0).cos()))
    }

    proptest! {
        #[test]
        fn expanded_rate_identity(
            c01 in 0.0..2.0f64, dphi in -PI..PI, cm10 in 0.0..2.0f64,
            chi0 in 0.0..5.0f64, phi0 in 0.0..(2.0 * PI), tau in 0.0..PI,
        ) {
            let diag = GratingDiagnostics {
                tau,
                c01: Complex::from_polar(c01, -dphi),
                cm10: Complex::new(cm10, 0.0),
                delta_phi01: dphi,
                valid: true,
            };
            let r4 = backward_rate_from_diagnostics(&diag, &PumpConfig::new(chi0, phi0));
            let r5 = rate_expanded(c01, dphi, cm10, chi0, phi0, tau);
            prop_assert!((r4 - r5).abs() < 1e-12 * (1.0 + r5.abs()));
        }

        #[test]
        fn population_phase_invariant(a in -PI..PI, seed in 0u64..50) {
            let st = random_state(seed);
            let r = rotate(&st.psi11, a);
            prop_assert!((population(&r) - population(&st.psi11)).abs() < 1e-12);
        }

        #[test]
        fn grating_phase_shifts(a0 in -PI..PI, a1 in -PI..PI, am in -PI..PI, seed in 0u64..50) {
            let st = random_state(seed);
            let d = grating_diagnostics(&st);
            // raise each mode phase φ by α, i.e. ψ → ψ e^{-iα}
            let rot = SystemState {
                tau: st.tau,
                psi00: rotate(&st.psi00, -a0),
                psi11: rotate(&st.psi11, -a1),
                psim1m1: rotate(&st.psim1m1, -am),
            };
            let dr = grating_diagnostics(&rot);
            prop_assert!((dr.c01.norm() - d.c01.norm()).abs() < 1e-10 * d.c01.norm());
            let shift = wrap_pi(dr.delta_phi01 - d.delta_phi01);
            let expected = wrap_pi(2.0 * a0 - a1 - am);
            prop_assert!(wrap_pi(shift - expected).abs() < 1e-9);
        }

        #[test]
        fn fit_exact_on_noiseless_sinusoids(
            amp in 0.01..10.0f64, delta in -3.1..3.1f64, base in -5.0..5.0f64, n in 6usize..40,
        ) {
            let pts: Vec<(f64, f64)> = uniform_phases(n)
                .into_iter()
                .map(|p| (p, -amp * (p + delta).cos() + base))
                .collect();
            let fit = fit_phase_response(&pts).unwrap();
            prop_assert!((fit.amplitude - amp).abs() < 1e-9 * amp.max(1.0));
            prop_assert!(wrap_pi(fit.offset - delta).abs() < 1e-9);
            prop_assert!((fit.baseline - base).abs() < 1e-9 * base.abs().max(1.0));
            prop_assert!((fit.quality - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn fit_recovers_reference_sinusoid() {
        let pts: Vec<(f64, f64)> = uniform_phases(12)
            .into_iter()
            .map(|p| (p, -(p + PI / 2.0).cos() + 2.0))
            .collect();
        let fit = fit_phase_response(&pts).unwrap();
        assert!((fit.amplitude - 1.0).abs() < 1e-10);
        assert!((fit.offset - PI / 2.0).abs() < 1e-10);
        assert!((fit.baseline - 2.0).abs() < 1e-10);
        assert!((fit.quality - 1.0).abs() < 1e-10);
        assert!((fit.maximizer - PI / 2.0).abs() < 1e-10);
        assert!((fit.minimizer - 3.0 * PI / 2.0).abs() < 1e-10);
        assert!(!fit.degenerate);
        assert!((fit.evaluate(PI / 2.0) - 3.0).abs() < 1e-10);
    }

    #[test]
    fn fit_constant_data_is_degenerate() {
        let pts: Vec<(f64, f64)> = uniform_phases(8).into_iter().map(|p| (p, 0.25)).collect();
        let fit = fit_phase_response(&pts).unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.amplitude, 0.0);
        assert_eq!(fit.baseline, 0.25);
    }

    #[test]
    fn fit_input_checks() {
        let few: Vec<(f64, f64)> = uniform_phases(5)
            .into_iter()
            .map(|p| (p, p.sin()))
            .collect();
        assert!(matches!(
            fit_phase_response(&few),
            Err(FitError::TooFewPoints { got: 5, .. })
        ));
        let half: Vec<(f64, f64)> = (0..10).map(|k| (k as f64 * 0.3, 1.0 + k as f64)).collect();
        assert!(matches!(
            fit_phase_response(&half),
            Err(FitError::InsufficientCoverage { .. })
        ));
        let mut bad: Vec<(f64, f64)> = uniform_phases(8)
            .into_iter()
            .map(|p| (p, p.cos()))
            .collect();
        bad[3].1 = f64::NAN;
        assert_eq!(fit_phase_response(&bad), Err(FitError::NonFinite(3)));
        // 0.3π spacing, seven points
        let exp: Vec<(f64, f64)> = (0..7)
            .map(|k| {
                let p = 0.3 * PI * k as f64;
                (p, -(p + 0.5).cos())
            })
            .collect();
        let fit = fit_phase_response(&exp).unwrap();
        assert!((fit.offset - 0.5).abs() < 1e-10);
    }
}
