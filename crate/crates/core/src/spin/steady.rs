use std::f64::consts::SQRT_2;

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::hamiltonian::SpinHamiltonian;
use super::master::Rates;
use super::state::SpinState;

/// Closed-form steady state of the two-level equations at rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SteadyState {
    Driven {
        rho11: f64,
        rho01: (f64, f64),
        /// f₀ = Γ(Γ₁² + δ₊²) / (Γ₁(g₁² + g₂²))
        f0: f64,
    },
    /// No absorption (g₁ = g₂ = 0 or Γ₁ = 0): everything is pumped to |0⟩
    /// and f₀ is infinite.
    Dark,
}

impl SteadyState {
    pub fn rho11(&self) -> f64 {
        match *self {
            SteadyState::Driven { rho11, .. } => rho11,
            SteadyState::Dark => 0.0,
        }
    }

    pub fn rho01(&self) -> C64 {
        match *self {
            SteadyState::Driven { rho01, .. } => C64::new(rho01.0, rho01.1),
            SteadyState::Dark => C64::new(0.0, 0.0),
        }
    }

    pub fn f0(&self) -> Option<f64> {
        match *self {
            SteadyState::Driven { f0, .. } => Some(f0),
            SteadyState::Dark => None,
        }
    }

    pub fn to_state(&self) -> SpinState {
        SpinState::from_two_level(self.rho11(), self.rho01())
    }
}

/// The saturation parameter f₀ for the detuning seen by |+1⟩ (Doppler
/// included). `None` in the dark limit.
pub fn saturation_parameter(h: &SpinHamiltonian, rates: &Rates) -> Option<f64> {
    let drive = h.drive_sq();
    if drive == 0.0 || rates.dephase == 0.0 {
        return None;
    }
    let d = h.effective_delta_plus();
    Some(rates.pump * (rates.dephase * rates.dephase + d * d) / (rates.dephase * drive))
}

pub fn steady_state_analytic(h: &SpinHamiltonian, rates: &Rates) -> SteadyState {
    let Some(f0) = saturation_parameter(h, rates) else {
        return SteadyState::Dark;
    };
    let rho11 = 1.0 / (2.0 + f0);
    let num = -C64::new(h.g2, h.g1) * f0;
    let den = C64::new(rates.dephase, -h.effective_delta_plus()) * (SQRT_2 * (2.0 + f0));
    let rho01 = num / den;
    SteadyState::Driven {
        rho11,
        rho01: (rho01.re, rho01.im),
        f0,
    }
}

/// Coherence slaved to the instantaneous populations,
/// ρ₀₁ = (i g₁ + g₂)(ρ₁₁ − ρ₀₀) / (√2 (Γ₁ − iδ₊)).
pub fn adiabatic_coherence(h: &SpinHamiltonian, dephase: f64, rho11: f64, rho00: f64) -> C64 {
    C64::new(h.g2, h.g1) * (rho11 - rho00) / (C64::new(dephase, -h.effective_delta_plus()) * SQRT_2)
}
