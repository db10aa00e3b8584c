//! Rigid-rotor libration of the spheroid in the trap: deterministic damped
//! motion, spin and rotor integrated together, and the stochastic ensemble.
//!
//! The reduced small-β model keeps α̇ fixed (the α torque is of order γB₁),
//! conserves ω₃ = α̇cosβ + γ̇ and integrates β as a signed angle; β < 0 is the
//! same orientation as (α + π, −β, γ − π) and is folded back on output.

mod coupled;
mod deterministic;
mod field;
mod langevin;
mod state;

pub use coupled::{integrate_coupled, CoupledOptions, CoupledTrajectory};
pub use deterministic::{
    equilibrium_beta, integrate_deterministic, DeterministicOptions, Potential, RotorTrajectory,
};
pub use field::{AnalyticField, ConstantField, FieldValue, FrictionField, LinearResponseField};
pub use langevin::{langevin_ensemble, CoolingReport, EnsembleOptions, LangevinModel};
pub use state::RotorState;

#[cfg(test)]
mod tests;
