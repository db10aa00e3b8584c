//! Torque on the particle, velocity expansion of the spin response, friction
//! and momentum diffusion coefficients, and the predicted temperature.

mod analytic;
mod correlation;
mod linear;
mod oracle;
mod torque;

pub use analytic::{
    alpha_impulse_integral, fig4_rows, friction_adiabatic, friction_analytic, ImpulseCheck, Region,
    ResponseCoefficients,
};
pub use correlation::{correlation_and_diffusion, CorrelationReport};
pub use linear::{dynamic_friction, linear_response_friction, FrictionPair};
pub use oracle::{friction_numeric_oracle, OracleOptions, OracleResult};
pub use torque::{steady_energy_gradient, torque_expectation};

#[cfg(test)]
mod tests;
