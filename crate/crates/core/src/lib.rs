//! Two-frequency-pumped superradiant scattering from an elongated
//! Bose-Einstein condensate.
//!
//! The numerical core ([`model`], [`solver`], [`analysis`], [`reduced`]) is
//! generic over the [`Real`] scalar; the aliases below fix it to `f64`, which
//! is what the sweep harness and the CLI use.

pub mod analysis;
pub mod calibration;
pub mod config;
pub mod error;
pub mod figures;
pub mod model;
pub mod plot;
pub mod reduced;
pub mod scalar;
pub mod solver;
pub mod sweep;

pub use error::Error;
pub use scalar::Real;

pub type Grid = model::SpatialGrid<f64>;
pub type Field = model::ModeField<f64>;
pub type State = model::SystemState<f64>;
pub type Pump = model::PumpConfig<f64>;
pub type Config = model::SimConfig<f64>;
pub type Endfire = solver::EndfireField<f64>;
pub type Traj = solver::Trajectory<f64>;
pub type Diagnostics = analysis::GratingDiagnostics<f64>;
pub type Fit = analysis::PhaseFit<f64>;
pub type Logistic = reduced::LogisticParams<f64>;
