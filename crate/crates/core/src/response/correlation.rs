use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::consts::HBAR;
use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::params::SystemConfig;
use crate::quad::simpson_uniform;
use crate::spin::hamiltonian::{PLUS, ZERO};
use crate::spin::{
    build_hamiltonian, steady_state_analytic, MasterOptions, Rates, SpinHamiltonian,
};

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub times: Vec<f64>,
    /// (p_s − p_s²)·exp(−(2+f₀)Γt/f₀)
    pub g_analytic: Vec<f64>,
    /// ⟨S_z(t)S_z(0)⟩ − p_s² from the regression theorem on the full
    /// two-level generator.
    pub g_regression: Vec<f64>,
    /// Closed form, J²·s
    pub d_p: f64,
    /// Simpson quadrature of the sampled analytic G(t), J²·s
    pub d_p_quadrature: f64,
    /// Simpson quadrature of the regression-theorem G(t), J²·s
    pub d_p_regression: f64,
    pub g0: f64,
    /// rad/s
    pub correlation_rate: f64,
}

/// Samples per correlation time span; the span is `LIFETIMES` decay times.
const SAMPLES: usize = 4001;
const LIFETIMES: f64 = 40.0;

fn lindblad_2x2(h: &Matrix2<C64>, rates: &Rates, x: &Matrix2<C64>) -> Matrix2<C64> {
    let mut d = (h * x - x * h) * C64::new(0.0, -1.0);
    d[(1, 1)] -= x[(1, 1)] * rates.pump;
    d[(0, 0)] += x[(1, 1)] * rates.pump;
    d[(0, 1)] -= x[(0, 1)] * rates.dephase;
    d[(1, 0)] -= x[(1, 0)] * rates.dephase;
    d
}

fn block(h: &SpinHamiltonian) -> Matrix2<C64> {
    let m = h.matrix();
    Matrix2::new(
        m[(ZERO, ZERO)],
        m[(ZERO, PLUS)],
        m[(PLUS, ZERO)],
        m[(PLUS, PLUS)],
    )
}

fn pack(x: &Matrix2<C64>) -> [f64; 8] {
    let mut y = [0.0; 8];
    for (k, c) in x.iter().enumerate() {
        y[2 * k] = c.re;
        y[2 * k + 1] = c.im;
    }
    y
}

fn unpack(y: &[f64; 8]) -> Matrix2<C64> {
    Matrix2::from_iterator((0..4).map(|k| C64::new(y[2 * k], y[2 * k + 1])))
}

/// Torque autocorrelation and momentum diffusion at one orientation.
pub fn correlation_and_diffusion(
    cfg: &SystemConfig,
    alpha: f64,
    beta: f64,
) -> Result<CorrelationReport> {
    let h = build_hamiltonian(cfg, alpha, beta, 0.0);
    let rates = Rates::from_config(cfg);
    let steady = steady_state_analytic(&h, &rates);
    let Some(f0) = steady.f0() else {
        return Err(Error::DarkState);
    };
    let p_s = steady.rho11();
    let g0 = p_s - p_s * p_s;
    let rate = (2.0 + f0) * rates.pump / f0;
    let geom = cfg.zeeman_b0 * (alpha.cos() * beta.cos() - beta.sin());
    let prefactor = f64::from(cfg.nv_count) * (0.5 * geom * geom * HBAR * HBAR);

    let t_end = LIFETIMES / rate;
    let dt = t_end / (SAMPLES - 1) as f64;
    let times: Vec<f64> = (0..SAMPLES).map(|k| k as f64 * dt).collect();
    let g_analytic: Vec<f64> = times.iter().map(|t| g0 * (-rate * t).exp()).collect();

    // X(0) = S_z ρ_s with S_z = diag(0, 1) on {|0⟩, |+1⟩}
    let hb = block(&h);
    let rho = steady.to_state().rho;
    let x0 = Matrix2::new(
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        rho[(PLUS, ZERO)],
        rho[(PLUS, PLUS)],
    );
    let mut f = |_: f64, y: &[f64; 8]| pack(&lindblad_2x2(&hb, &rates, &unpack(y)));
    let mut ig = Dopri5::new(0.0, pack(&x0), MasterOptions::default().tol);
    let mut g_regression = Vec::with_capacity(SAMPLES);
    for &t in &times {
        ig.advance_to(t, &mut f)?;
        g_regression.push(unpack(&ig.y)[(1, 1)].re - p_s * p_s);
    }

    Ok(CorrelationReport {
        d_p: prefactor * g0 / rate,
        d_p_quadrature: prefactor * simpson_uniform(&g_analytic, dt),
        d_p_regression: prefactor * simpson_uniform(&g_regression, dt),
        times,
        g_analytic,
        g_regression,
        g0,
        correlation_rate: rate,
    })
}
