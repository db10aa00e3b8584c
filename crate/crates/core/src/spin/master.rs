//! Dissipative evolution of the NV spin.
//!
//! Two-level mode integrates the {|0⟩, |+1⟩} block exactly as the component
//! equations
//!
//! ```text
//! ρ̇₁₁ = −(g₂/√2)(ρ₀₁+ρ₁₀) + (i g₁/√2)(ρ₀₁−ρ₁₀) − Γρ₁₁
//! ρ̇₀₁ = i(δ₊ − α̇cosβ)ρ₀₁ + (i g₁/√2)(ρ₁₁−ρ₀₀) + (g₂/√2)(ρ₁₁−ρ₀₀) − Γ₁ρ₀₁
//! ```
//!
//! with ρ₀₀ = 1 − ρ₁₁. Three-level mode keeps |−1⟩ (detuning δ₋, the same
//! spin-1 couplings), pumps both |±1⟩ into |0⟩ at Γ, damps 0/±1 coherences
//! at Γ₁ and the ±1 coherence at Γ. It exists to bound the reduction error.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::hamiltonian::{SpinHamiltonian, MINUS, PLUS, ZERO};
use super::state::SpinState;
use crate::error::{Error, Result};
use crate::ode::{Dopri5, Tolerances};
use crate::params::SystemConfig;

/// Phenomenological pumping (Γ) and coherence decay (Γ₁) rates, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rates {
    pub pump: f64,
    pub dephase: f64,
}

impl Rates {
    pub fn from_config(cfg: &SystemConfig) -> Self {
        Rates {
            pump: cfg.pump_rate,
            dephase: cfg.dephase_rate,
        }
    }

    /// Coherences slaved to populations needs Γ₁ well above Γ.
    pub fn adiabatic_ok(&self) -> bool {
        self.dephase >= 5.0 * self.pump
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Levels {
    Two,
    Three,
}

#[derive(Debug, Clone, Copy)]
pub struct MasterOptions {
    pub levels: Levels,
    pub tol: Tolerances,
}

impl Default for MasterOptions {
    fn default() -> Self {
        MasterOptions {
            levels: Levels::Two,
            tol: Tolerances::default().with_rtol(1e-9).with_atol(1e-13),
        }
    }
}

impl MasterOptions {
    pub fn three_level() -> Self {
        MasterOptions {
            levels: Levels::Three,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpinTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpinState>,
}

impl SpinTrajectory {
    pub fn last(&self) -> Option<&SpinState> {
        self.states.last()
    }
}

/// Right-hand side of the two-level equations on (ρ₁₁, Re ρ₀₁, Im ρ₀₁).
#[inline]
pub fn two_level_rhs(h: &SpinHamiltonian, rates: &Rates, y: &[f64; 3]) -> [f64; 3] {
    let r = FRAC_1_SQRT_2;
    let rho11 = y[0];
    let rho01 = C64::new(y[1], y[2]);
    let rho10 = rho01.conj();
    let inversion = 2.0 * rho11 - 1.0;
    let i = C64::i();
    let d11 = -r * h.g2 * (rho01 + rho10) + i * r * h.g1 * (rho01 - rho10) - rates.pump * rho11;
    let d01 = i * h.effective_delta_plus() * rho01 + (i * r * h.g1 + r * h.g2) * inversion
        - rates.dephase * rho01;
    [d11.re, d01.re, d01.im]
}

/// Right-hand side of the three-level equations on the packed 3×3 matrix.
pub fn three_level_rhs(h: &SpinHamiltonian, rates: &Rates, y: &[f64; 18]) -> [f64; 18] {
    let rho = SpinState::unpack(y).rho;
    let hm = h.matrix();
    let comm = hm * rho - rho * hm;
    let mut d: Matrix3<C64> = comm * C64::new(0.0, -1.0);
    let g = rates.pump;
    let g1 = rates.dephase;
    d[(PLUS, PLUS)] -= rho[(PLUS, PLUS)] * g;
    d[(MINUS, MINUS)] -= rho[(MINUS, MINUS)] * g;
    d[(ZERO, ZERO)] += (rho[(PLUS, PLUS)] + rho[(MINUS, MINUS)]) * g;
    for (a, b) in [(ZERO, PLUS), (PLUS, ZERO), (ZERO, MINUS), (MINUS, ZERO)] {
        d[(a, b)] -= rho[(a, b)] * g1;
    }
    for (a, b) in [(PLUS, MINUS), (MINUS, PLUS)] {
        d[(a, b)] -= rho[(a, b)] * g;
    }
    SpinState { rho: d }.pack()
}

/// The two-level equations written as ẏ = A y + b on (ρ₁₁, Re ρ₀₁, Im ρ₀₁).
pub fn bloch_generator(h: &SpinHamiltonian, rates: &Rates) -> (Matrix3<f64>, Vector3<f64>) {
    let s = std::f64::consts::SQRT_2;
    let r = FRAC_1_SQRT_2;
    let d = h.effective_delta_plus();
    #[rustfmt::skip]
    let a = Matrix3::new(
        -rates.pump, -s * h.g2,      -s * h.g1,
        s * h.g2,    -rates.dephase, -d,
        s * h.g1,    d,              -rates.dephase,
    );
    (a, Vector3::new(0.0, -r * h.g2, -r * h.g1))
}

/// Integrates the master equation with a time-dependent Hamiltonian and
/// returns the state at every sample time.
pub fn evolve_master<F>(
    initial: &SpinState,
    hamiltonian: F,
    rates: Rates,
    t0: f64,
    samples: &[f64],
    opts: &MasterOptions,
) -> Result<SpinTrajectory>
where
    F: Fn(f64) -> SpinHamiltonian,
{
    let mut states = Vec::with_capacity(samples.len());
    match opts.levels {
        Levels::Two => {
            let mut f = |t: f64, y: &[f64; 3]| two_level_rhs(&hamiltonian(t), &rates, y);
            let mut ig = Dopri5::new(t0, initial.to_bloch(), opts.tol);
            for &ts in samples {
                ig.advance_to(ts, &mut f)?;
                states.push(SpinState::from_bloch(&ig.y));
            }
        }
        Levels::Three => {
            let mut f = |t: f64, y: &[f64; 18]| three_level_rhs(&hamiltonian(t), &rates, y);
            let mut ig = Dopri5::new(t0, initial.pack(), opts.tol);
            for &ts in samples {
                ig.advance_to(ts, &mut f)?;
                states.push(SpinState::unpack(&ig.y));
            }
        }
    }
    Ok(SpinTrajectory {
        times: samples.to_vec(),
        states,
    })
}

/// Generator residual |ẏ| relative to the fastest rate in the problem.
pub fn steady_residual(h: &SpinHamiltonian, rates: &Rates, state: &SpinState) -> f64 {
    let dy = two_level_rhs(h, rates, &state.to_bloch());
    let scale =
        rates.pump + rates.dephase + h.effective_delta_plus().abs() + h.g1.abs() + h.g2.abs();
    dy.iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale
}

/// Evolves a static two-level problem until the generator residual drops
/// below `residual_tol`. Returns the state and the elapsed time.
pub fn evolve_to_steady(
    initial: &SpinState,
    h: &SpinHamiltonian,
    rates: Rates,
    residual_tol: f64,
    opts: &MasterOptions,
) -> Result<(SpinState, f64)> {
    let slow = rates.pump.min(rates.dephase);
    if !(slow > 0.0) {
        return Err(Error::Invalid("no steady state without damping".into()));
    }
    let chunk = 1.0 / slow;
    let mut f = |_: f64, y: &[f64; 3]| two_level_rhs(h, &rates, y);
    let mut ig = Dopri5::new(0.0, initial.to_bloch(), opts.tol);
    for k in 1..=2000 {
        ig.advance_to(k as f64 * chunk, &mut f)?;
        let s = SpinState::from_bloch(&ig.y);
        if steady_residual(h, &rates, &s) < residual_tol {
            return Ok((s, ig.t));
        }
    }
    Err(Error::StepFailure { t_last: ig.t })
}
