use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::params::SystemConfig;

/// Basis indices for the NV ground-state triplet, ordered {|−1⟩, |0⟩, |+1⟩}.
pub const MINUS: usize = 0;
pub const ZERO: usize = 1;
pub const PLUS: usize = 2;

/// Coefficients of the rotating-frame, RWA effective Hamiltonian at one
/// orientation and spin rate, all in rad/s.
///
/// H = (D−ω)S_Z² − [(γB₀/√2)(cosα sinβ + cosβ) + α̇cosβ] S_Z − g₁S_X + g₂S_Y
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinHamiltonian {
    /// Static detuning of |+1⟩.
    pub delta_plus: f64,
    /// Static detuning of |−1⟩.
    pub delta_minus: f64,
    pub g1: f64,
    pub g2: f64,
    /// Rotational Doppler shift α̇cosβ; lowers |+1⟩ and raises |−1⟩.
    pub doppler: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Projection of the static field on the body axis, (γB₀/√2)(cosα sinβ + cosβ).
pub fn zeeman_projection(cfg: &SystemConfig, alpha: f64, beta: f64) -> f64 {
    FRAC_1_SQRT_2 * cfg.zeeman_b0 * (alpha.cos() * beta.sin() + beta.cos())
}

/// β-derivative of the projection, (γB₀/√2)(cosα cosβ − sinβ).
pub fn zeeman_slope(cfg: &SystemConfig, alpha: f64, beta: f64) -> f64 {
    FRAC_1_SQRT_2 * cfg.zeeman_b0 * (alpha.cos() * beta.cos() - beta.sin())
}

pub fn build_hamiltonian(
    cfg: &SystemConfig,
    alpha: f64,
    beta: f64,
    alpha_dot: f64,
) -> SpinHamiltonian {
    let offset = cfg.detuning_offset();
    let proj = zeeman_projection(cfg, alpha, beta);
    SpinHamiltonian {
        delta_plus: offset - proj,
        delta_minus: offset + proj,
        g1: 0.5 * cfg.zeeman_b1 * alpha.cos() * beta.cos(),
        g2: 0.5 * cfg.zeeman_b1 * alpha.sin(),
        doppler: alpha_dot * beta.cos(),
        alpha,
        beta,
    }
}

impl SpinHamiltonian {
    /// Energy of |+1⟩ including the Doppler term, δ₊ − α̇cosβ.
    pub fn effective_delta_plus(&self) -> f64 {
        self.delta_plus - self.doppler
    }

    pub fn effective_delta_minus(&self) -> f64 {
        self.delta_minus + self.doppler
    }

    /// g₁² + g₂².
    pub fn drive_sq(&self) -> f64 {
        self.g1 * self.g1 + self.g2 * self.g2
    }

    /// Same Hamiltonian with the Doppler shift folded into the detunings.
    pub fn with_doppler_folded(&self) -> Self {
        SpinHamiltonian {
            delta_plus: self.effective_delta_plus(),
            delta_minus: self.effective_delta_minus(),
            doppler: 0.0,
            ..*self
        }
    }

    /// Full 3×3 matrix (rad/s) in the {|−1⟩, |0⟩, |+1⟩} basis.
    pub fn matrix(&self) -> Matrix3<C64> {
        let (sx, sy, _) = spin1_operators();
        let mut h = sx * C64::new(-self.g1, 0.0) + sy * C64::new(self.g2, 0.0);
        h[(MINUS, MINUS)] += C64::new(self.effective_delta_minus(), 0.0);
        h[(PLUS, PLUS)] += C64::new(self.effective_delta_plus(), 0.0);
        h
    }
}

/// Spin-1 (S_X, S_Y, S_Z) in the {|−1⟩, |0⟩, |+1⟩} basis.
pub fn spin1_operators() -> (Matrix3<C64>, Matrix3<C64>, Matrix3<C64>) {
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    let i = C64::new(0.0, FRAC_1_SQRT_2);
    #[rustfmt::skip]
    let sx = Matrix3::new(
        z, r, z,
        r, z, r,
        z, r, z,
    );
    #[rustfmt::skip]
    let sy = Matrix3::new(
        z,  i, z,
        -i, z, i,
        z, -i, z,
    );
    let sz = Matrix3::from_diagonal(&nalgebra::Vector3::new(
        C64::new(-1.0, 0.0),
        z,
        C64::new(1.0, 0.0),
    ));
    (sx, sy, sz)
}
