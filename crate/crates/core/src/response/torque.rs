use std::f64::consts::SQRT_2;

use num_complex::Complex64 as C64;

use crate::consts::HBAR;
use crate::params::SystemConfig;
use crate::spin::hamiltonian::zeeman_slope;
use crate::spin::{build_hamiltonian, SpinHamiltonian, SpinState};

/// Mean torques (M_α, M_β) in N·m from the spin state, using the
/// {|0⟩, |+1⟩} block. The B₀ contribution to M_α is left out, as in the
/// reduced model.
pub fn torque_expectation(
    h: &SpinHamiltonian,
    state: &SpinState,
    cfg: &SystemConfig,
) -> (f64, f64) {
    let tl = state.two_level();
    let sx = SQRT_2 * tl.rho01.0;
    let sy = SQRT_2 * tl.rho01.1;
    let sz = tl.rho11;
    let (sa, ca) = h.alpha.sin_cos();
    let (sb, cb) = h.beta.sin_cos();
    let half_b1 = 0.5 * cfg.zeeman_b1;
    let m_alpha = -half_b1 * sa * cb * sx - half_b1 * ca * sy;
    let m_beta = zeeman_slope(cfg, h.alpha, h.beta) * sz - half_b1 * ca * sb * sx;
    (HBAR * m_alpha, HBAR * m_beta)
}

/// −∂⟨H⟩/∂β at fixed ρ by central difference of the Hamiltonian matrix,
/// in N·m.
pub fn steady_energy_gradient(
    cfg: &SystemConfig,
    alpha: f64,
    beta: f64,
    state: &SpinState,
    step: f64,
) -> f64 {
    let hp = build_hamiltonian(cfg, alpha, beta + step, 0.0).matrix();
    let hm = build_hamiltonian(cfg, alpha, beta - step, 0.0).matrix();
    let dh = (hp - hm) / C64::new(2.0 * step, 0.0);
    -HBAR * state.expect(&dh).re
}
