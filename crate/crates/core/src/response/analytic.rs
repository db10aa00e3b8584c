use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use serde::Serialize;

use crate::consts::{HBAR, K_B, PLANCK_H};
use crate::error::{Error, Result};
use crate::params::SystemConfig;
use crate::quad;
use crate::spin::hamiltonian::zeeman_slope;
use crate::spin::{build_hamiltonian, steady_state_analytic, Rates, SteadyState};

use super::torque::torque_expectation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// δ₊ > 0: the spin torque damps β̇.
    Damping,
    /// δ₊ < 0: heating.
    AntiDamping,
    /// δ₊ = 0 or a vanishing geometric factor: no velocity-dependent torque.
    NoCooling,
}

impl Region {
    pub fn tag(self) -> &'static str {
        match self {
            Region::Damping => "damping",
            Region::AntiDamping => "anti_damping",
            Region::NoCooling => "no_cooling",
        }
    }
}

/// Linear-response coefficients at one orientation, SI units, already
/// multiplied by the number of NV centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponseCoefficients {
    pub alpha: f64,
    pub beta: f64,
    /// rad/s
    pub delta_plus: f64,
    /// N·m
    pub m_beta_0: f64,
    /// J·s
    pub kappa_alphabeta: f64,
    /// J·s
    pub kappa_beta: f64,
    /// J²·s
    pub d_p: f64,
    /// D_p/(k_B κ_β), K. `None` outside the damping region.
    pub t_f: Option<f64>,
    /// (1+f₀)(g₁²+g₂²)Γ₁/(δ₊Γ) · ħ/k_B, K.
    pub t_f_closed_form: Option<f64>,
    /// (Γ₁²+δ₊²)/δ₊ · ħ/k_B, K; the f₀ → ∞ limit of the closed form.
    pub t_f_large_f0: Option<f64>,
    pub p_s: f64,
    pub f0: f64,
    /// ∂[(2+f)Γ/f]/∂α̇ at α̇ = 0 (dimensionless).
    pub a1: f64,
    /// (2+f₀)Γ/f₀, rad/s
    pub correlation_rate: f64,
    /// p_s − p_s²
    pub g0: f64,
    pub region: Region,
    pub nv_count: u32,
}

impl ResponseCoefficients {
    pub fn kappa_beta_h(&self) -> f64 {
        self.kappa_beta / PLANCK_H
    }

    pub fn kappa_alphabeta_h(&self) -> f64 {
        self.kappa_alphabeta / PLANCK_H
    }
}

/// Friction, diffusion and temperature from the adiabatic-elimination
/// formulas with the simplified (β-independent drive) derivatives.
pub fn friction_analytic(
    cfg: &SystemConfig,
    alpha: f64,
    beta: f64,
) -> Result<ResponseCoefficients> {
    let h = build_hamiltonian(cfg, alpha, beta, 0.0);
    let rates = Rates::from_config(cfg);
    let steady = steady_state_analytic(&h, &rates);
    let SteadyState::Driven { f0, .. } = steady else {
        return Err(Error::DarkState);
    };
    let (gamma, gamma1) = (rates.pump, rates.dephase);
    let g_sq = h.drive_sq();
    let delta = h.delta_plus;
    let n = f64::from(cfg.nv_count);

    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let geom = ca * cb - sb;
    let b0 = cfg.zeeman_b0;
    let common = delta * f0 / (gamma1 * g_sq * (2.0 + f0).powi(3));
    let kappa_beta = (b0 * geom).powi(2) * common;
    let kappa_alphabeta = -(b0 * b0) * common * sa * sb * geom;

    let p_s = 1.0 / (2.0 + f0);
    let g0 = p_s - p_s * p_s;
    let correlation_rate = (2.0 + f0) * gamma / f0;
    let d_p = 0.5 * (b0 * geom).powi(2) * g0 / correlation_rate;
    let a1 = 4.0 * gamma * gamma * delta * cb / (gamma1 * g_sq * f0 * f0);

    let (_, m_beta_0) = torque_expectation(&h, &steady.to_state(), cfg);

    let region = if geom == 0.0 || b0 == 0.0 || delta == 0.0 {
        Region::NoCooling
    } else if delta > 0.0 {
        Region::Damping
    } else {
        Region::AntiDamping
    };
    let kelvin = HBAR / K_B;
    let (t_f, t_f_closed_form, t_f_large_f0) = if region == Region::Damping {
        (
            Some(kelvin * d_p / kappa_beta),
            Some(kelvin * (1.0 + f0) * g_sq * gamma1 / (delta * gamma)),
            Some(kelvin * (gamma1 * gamma1 + delta * delta) / delta),
        )
    } else {
        (None, None, None)
    };

    Ok(ResponseCoefficients {
        alpha,
        beta,
        delta_plus: delta,
        m_beta_0: n * m_beta_0,
        kappa_alphabeta: n * (HBAR * kappa_alphabeta),
        kappa_beta: n * (HBAR * kappa_beta),
        d_p: n * (HBAR * HBAR * d_p),
        t_f,
        t_f_closed_form,
        t_f_large_f0,
        p_s,
        f0,
        a1,
        correlation_rate,
        g0,
        region,
        nv_count: cfg.nv_count,
    })
}

/// (κ_αβ, κ_β) in J·s from the unsimplified adiabatic expressions, keeping
/// the orientation dependence of g₁, g₂ in ∂p_s.
pub fn friction_adiabatic(cfg: &SystemConfig, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    let h = build_hamiltonian(cfg, alpha, beta, 0.0);
    let rates = Rates::from_config(cfg);
    let Some(f0) = steady_state_analytic(&h, &rates).f0() else {
        return Err(Error::DarkState);
    };
    let (gamma, gamma1) = (rates.pump, rates.dephase);
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let g_sq = h.drive_sq();
    let delta = h.delta_plus;
    let width = gamma1 * gamma1 + delta * delta;
    let b1q = 0.25 * cfg.zeeman_b1 * cfg.zeeman_b1;
    let slope = zeeman_slope(cfg, alpha, beta);

    // ∂δ₊ and ∂(g₁²+g₂²) along α and β
    let dd_beta = -slope;
    let dd_alpha = FRAC_1_SQRT_2 * cfg.zeeman_b0 * sa * sb;
    let dg_beta = -2.0 * b1q * ca * ca * cb * sb;
    let dg_alpha = 2.0 * b1q * sa * ca * (1.0 - cb * cb);

    let df =
        |dd: f64, dg: f64| gamma / gamma1 * (2.0 * delta * dd / g_sq - width * dg / (g_sq * g_sq));
    let dp = |dd: f64, dg: f64| -df(dd, dg) / (2.0 + f0).powi(2);
    let pref = slope * f0 / (gamma * (2.0 + f0));
    let n = f64::from(cfg.nv_count);
    Ok((
        n * HBAR * pref * dp(dd_alpha, dg_alpha),
        n * HBAR * pref * dp(dd_beta, dg_beta),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpulseCheck {
    pub beta: f64,
    /// ∫₀^{2π} κ_αβ dα, J·s
    pub integral: f64,
    pub quad_error: f64,
    /// max over α of |κ_αβ|, J·s
    pub max_abs: f64,
}

impl ImpulseCheck {
    /// |∫| relative to 2π·max|κ_αβ|; zero when κ_αβ vanishes identically.
    pub fn relative(&self) -> f64 {
        if self.max_abs == 0.0 {
            return self.integral.abs();
        }
        self.integral.abs() / (TAU * self.max_abs)
    }
}

/// Net κ_αβ impulse over one revolution of α at fixed β.
pub fn alpha_impulse_integral(cfg: &SystemConfig, beta: f64) -> Result<ImpulseCheck> {
    let k = |a: f64| friction_analytic(cfg, a, beta).map(|r| r.kappa_alphabeta);
    let mut max_abs = 0.0f64;
    for i in 0..=720 {
        max_abs = max_abs.max(k(TAU * i as f64 / 720.0)?.abs());
    }
    let tol = 1e-13 * max_abs.max(f64::MIN_POSITIVE);
    let (integral, quad_error) = quad::integrate(|a| k(a).unwrap_or(f64::NAN), 0.0, TAU, tol);
    Ok(ImpulseCheck {
        beta,
        integral,
        quad_error,
        max_abs,
    })
}

/// Coefficients on an (α, β) grid, α outer.
pub fn fig4_rows(
    cfg: &SystemConfig,
    alphas: &[f64],
    betas: &[f64],
) -> Result<Vec<ResponseCoefficients>> {
    let mut rows = Vec::with_capacity(alphas.len() * betas.len());
    for &alpha in alphas {
        for &beta in betas {
            rows.push(friction_analytic(cfg, alpha, beta)?);
        }
    }
    Ok(rows)
}
