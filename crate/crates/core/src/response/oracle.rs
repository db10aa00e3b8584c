use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::Tolerances;
use crate::params::SystemConfig;
use crate::spin::hamiltonian::zeeman_slope;
use crate::spin::{build_hamiltonian, evolve_master, steady_state_analytic, MasterOptions, Rates};
use crate::stats::quadratic_fit;

use super::torque::torque_expectation;

#[derive(Debug, Clone)]
pub struct OracleOptions {
    /// Velocity multipliers applied to each sweep amplitude.
    pub multipliers: Vec<f64>,
    /// Ramp duration before the probe time, in units of f₀/((2+f₀)Γ).
    pub burn_in: f64,
    /// Largest accepted |quadratic|/|linear| over the sweep.
    pub nonlinear_limit: f64,
    pub master: MasterOptions,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            multipliers: vec![-2.0, -1.0, 0.0, 1.0, 2.0],
            burn_in: 30.0,
            nonlinear_limit: 0.05,
            master: MasterOptions {
                tol: Tolerances::default().with_rtol(1e-11).with_atol(1e-15),
                ..MasterOptions::default()
            },
        }
    }
}

impl OracleOptions {
    /// A β̇ amplitude for which the detuning sweeps by 10⁻³Γ₁ per
    /// population relaxation time.
    pub fn auto_rate(cfg: &SystemConfig, alpha: f64, beta: f64) -> f64 {
        let rates = Rates::from_config(cfg);
        let h = build_hamiltonian(cfg, alpha, beta, 0.0);
        let lambda = match steady_state_analytic(&h, &rates).f0() {
            Some(f0) => (2.0 + f0) * rates.pump / f0,
            None => rates.pump,
        };
        let slope = zeeman_slope(cfg, alpha, beta)
            .abs()
            .max(0.3 * cfg.zeeman_b0);
        1e-3 * rates.dephase * lambda / slope
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub alpha: f64,
    pub beta: f64,
    /// J·s; zero when the α̇ amplitude is zero.
    pub kappa_alphabeta: f64,
    /// J·s; zero when the β̇ amplitude is zero.
    pub kappa_beta: f64,
    /// Torque at rest from the time evolution, N·m.
    pub m_beta_0: f64,
    /// (|quadratic|·v_max + fit misfit/v_max)/|linear| of each sweep.
    pub nonlinearity_alpha: f64,
    pub nonlinearity_beta: f64,
    /// Integration noise floor divided by the largest velocity, J·s.
    pub noise_alpha: f64,
    pub noise_beta: f64,
    /// Whether the linear term stands 10× above the noise.
    pub resolved_alpha: bool,
    pub resolved_beta: bool,
}

struct Sweep {
    kappa: f64,
    intercept: f64,
    nonlinearity: f64,
    noise: f64,
    resolved: bool,
}

/// Finite-velocity extraction of the friction coefficients: the angles are
/// ramped at constant rate through (α, β), the master equation is integrated
/// from the steady state at the ramp start, and ⟨M_β⟩ at the crossing time is
/// regressed on the velocity. Amplitudes are in rad/s.
pub fn friction_numeric_oracle(
    cfg: &SystemConfig,
    alpha: f64,
    beta: f64,
    alpha_rate: f64,
    beta_rate: f64,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    let rates = Rates::from_config(cfg);
    let h0 = build_hamiltonian(cfg, alpha, beta, 0.0);
    let Some(f0) = steady_state_analytic(&h0, &rates).f0() else {
        return Err(Error::DarkState);
    };
    let t_ramp = opts.burn_in * f0 / ((2.0 + f0) * rates.pump);
    let n = f64::from(cfg.nv_count);

    let probe = |adot: f64, bdot: f64| -> Result<f64> {
        let (a0, b0) = (alpha - adot * t_ramp, beta - bdot * t_ramp);
        let ham = |t: f64| build_hamiltonian(cfg, a0 + adot * t, b0 + bdot * t, adot);
        let start = steady_state_analytic(&ham(0.0), &rates).to_state();
        let tr = evolve_master(&start, ham, rates, 0.0, &[t_ramp], &opts.master)?;
        let h_end = build_hamiltonian(cfg, alpha, beta, adot);
        let (_, m_beta) = torque_expectation(&h_end, tr.last().expect("one sample"), cfg);
        Ok(n * m_beta)
    };

    let sweep = |amp: f64, along_alpha: bool| -> Result<Option<Sweep>> {
        if amp == 0.0 {
            return Ok(None);
        }
        let xs: Vec<f64> = opts.multipliers.iter().map(|m| m * amp).collect();
        let ys = xs
            .par_iter()
            .map(|&v| {
                if along_alpha {
                    probe(v, 0.0)
                } else {
                    probe(0.0, v)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        let [c0, c1, c2] = quadratic_fit(&xs, &ys);
        let vmax = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let rss: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - (c0 + c1 * x + c2 * x * x)).powi(2))
            .sum();
        let misfit = (rss / xs.len() as f64).sqrt();
        // integration error sets the noise floor of each probe
        let noise = opts.master.tol.rtol * c0.abs() / vmax;
        let resolved = c1.abs() > 10.0 * noise;
        // higher odd orders show up as misfit of the quadratic
        let nonlinearity = if c1 == 0.0 {
            f64::INFINITY
        } else {
            (c2.abs() * vmax + misfit / vmax) / c1.abs()
        };
        if resolved && nonlinearity > opts.nonlinear_limit {
            return Err(Error::Nonlinear {
                ratio: nonlinearity,
            });
        }
        Ok(Some(Sweep {
            kappa: -c1,
            intercept: c0,
            nonlinearity,
            noise,
            resolved,
        }))
    };

    let sa = sweep(alpha_rate, true)?;
    let sb = sweep(beta_rate, false)?;
    let m_beta_0 = match (&sa, &sb) {
        (_, Some(s)) | (Some(s), None) => s.intercept,
        (None, None) => probe(0.0, 0.0)?,
    };
    let parts = |s: &Option<Sweep>| {
        s.as_ref().map_or((0.0, 0.0, 0.0, false), |s| {
            (s.kappa, s.nonlinearity, s.noise, s.resolved)
        })
    };
    let (ka, nla, noa, rsa) = parts(&sa);
    let (kb, nlb, nob, rsb) = parts(&sb);
    Ok(OracleResult {
        alpha,
        beta,
        kappa_alphabeta: ka,
        kappa_beta: kb,
        m_beta_0,
        nonlinearity_alpha: nla,
        nonlinearity_beta: nlb,
        noise_alpha: noa,
        noise_beta: nob,
        resolved_alpha: rsa,
        resolved_beta: rsb,
    })
}
