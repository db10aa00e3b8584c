use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::consts::HBAR;
use crate::error::{Error, Result};
use crate::params::SystemConfig;
use crate::spin::hamiltonian::zeeman_slope;
use crate::spin::{bloch_generator, build_hamiltonian, Rates};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrictionPair {
    /// J·s
    pub kappa_alphabeta: f64,
    /// J·s
    pub kappa_beta: f64,
}

const FD_STEP: f64 = 1e-5;

fn steady_bloch(cfg: &SystemConfig, rates: &Rates, alpha: f64, beta: f64) -> Result<Vector3<f64>> {
    let (a, b) = bloch_generator(&build_hamiltonian(cfg, alpha, beta, 0.0), rates);
    a.lu().solve(&(-b)).ok_or(Error::DarkState)
}

/// Friction at drive frequency ω from the full two-level equations,
/// linearised in the angular velocities without eliminating the coherence.
/// Returns (κ_αβ(ω), κ_β(ω)) in J·s; the real part is the dissipative one.
pub fn dynamic_friction(
    cfg: &SystemConfig,
    alpha: f64,
    beta: f64,
    omega: f64,
) -> Result<(C64, C64)> {
    let rates = Rates::from_config(cfg);
    let (a, _) = bloch_generator(&build_hamiltonian(cfg, alpha, beta, 0.0), &rates);
    let ys = steady_bloch(cfg, &rates, alpha, beta)?;
    let d_alpha = (steady_bloch(cfg, &rates, alpha + FD_STEP, beta)?
        - steady_bloch(cfg, &rates, alpha - FD_STEP, beta)?)
        / (2.0 * FD_STEP);
    let d_beta = (steady_bloch(cfg, &rates, alpha, beta + FD_STEP)?
        - steady_bloch(cfg, &rates, alpha, beta - FD_STEP)?)
        / (2.0 * FD_STEP);

    // the Doppler shift enters the generator through δ₊ − α̇cosβ
    let cb = beta.cos();
    let mut da_dot = Matrix3::zeros();
    da_dot[(1, 2)] = cb;
    da_dot[(2, 1)] = -cb;

    let resolvent = (Matrix3::from_diagonal_element(C64::new(0.0, omega))
        - a.map(|x| C64::new(x, 0.0)))
    .try_inverse()
    .ok_or(Error::DarkState)?;
    let torque_row = Vector3::new(
        zeeman_slope(cfg, alpha, beta),
        -FRAC_1_SQRT_2 * cfg.zeeman_b1 * alpha.cos() * beta.sin(),
        0.0,
    )
    .map(|x| C64::new(x, 0.0));

    let scale = HBAR * f64::from(cfg.nv_count);
    // velocity v drives y₁ = (iω − A)⁻¹ s v with s the source below; κ = −m·y₁/v
    let response = |source: Vector3<f64>| -> C64 {
        let y1 = resolvent * source.map(|x| C64::new(x, 0.0));
        -torque_row.dot(&y1) * scale
    };
    let k_beta = response(-d_beta);
    let k_alphabeta = response(-d_alpha + da_dot * ys);
    Ok((k_alphabeta, k_beta))
}

/// Zero-frequency limit of [`dynamic_friction`].
pub fn linear_response_friction(cfg: &SystemConfig, alpha: f64, beta: f64) -> Result<FrictionPair> {
    let (ka, kb) = dynamic_friction(cfg, alpha, beta, 0.0)?;
    Ok(FrictionPair {
        kappa_alphabeta: ka.re,
        kappa_beta: kb.re,
    })
}
