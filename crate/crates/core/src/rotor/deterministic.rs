use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::field::FrictionField;
use super::state::RotorState;
use crate::error::{Error, Result};
use crate::ode::{Dopri5, Tolerances};
use crate::params::TrapModel;
use crate::stats::linear_fit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    /// ½kβ²
    Harmonic,
    /// ½k sin²β, the full cos²β trap
    Full,
}

impl Potential {
    pub fn torque(self, trap: &TrapModel, beta: f64) -> f64 {
        match self {
            Potential::Harmonic => -trap.trap_stiffness_k * beta,
            Potential::Full => trap.restoring_torque(beta),
        }
    }

    /// U(β) − U(0)
    pub fn energy(self, trap: &TrapModel, beta: f64) -> f64 {
        match self {
            Potential::Harmonic => 0.5 * trap.trap_stiffness_k * beta * beta,
            Potential::Full => trap.potential(beta) - trap.potential(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DeterministicOptions {
    pub potential: Potential,
    pub tol: Tolerances,
    /// Number of uniformly spaced output samples (≥ 2).
    pub samples: usize,
    /// |β| beyond this stops the run and flags it untrapped.
    pub escape_bound: f64,
}

impl Default for DeterministicOptions {
    fn default() -> Self {
        DeterministicOptions {
            potential: Potential::Harmonic,
            tol: Tolerances::default().with_rtol(1e-10).with_atol(1e-14),
            samples: 2001,
            escape_bound: FRAC_PI_2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RotorTrajectory {
    pub times: Vec<f64>,
    /// Canonical orientations.
    pub states: Vec<RotorState>,
    /// Libration energy about the biased equilibrium, J.
    pub energy: Vec<f64>,
    /// κ_β at each sample, J·s.
    pub kappa_beta: Vec<f64>,
    pub beta_eq: f64,
    pub untrapped: bool,
}

impl RotorTrajectory {
    /// Slope of ln E against t (1/s); negative when damped.
    pub fn energy_rate(&self) -> Option<f64> {
        energy_rate(&self.times, &self.energy)
    }

    /// Energy e-folding time from a straight-line fit of ln E.
    pub fn damping_time_fit(&self) -> Option<f64> {
        self.energy_rate().filter(|r| *r < 0.0).map(|r| -1.0 / r)
    }

    /// Plain time average of κ_β over the samples.
    pub fn kappa_time_mean(&self) -> f64 {
        self.kappa_beta.iter().sum::<f64>() / self.kappa_beta.len() as f64
    }

    /// κ_β averaged with weight β̇², the weight that sets the energy loss
    /// rate −κ_β β̇².
    pub fn kappa_power_mean(&self) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for (k, s) in self.kappa_beta.iter().zip(&self.states) {
            let w = s.beta_dot * s.beta_dot;
            num += k * w;
            den += w;
        }
        num / den
    }
}

pub(crate) fn energy_rate(times: &[f64], energy: &[f64]) -> Option<f64> {
    let (t, le): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(energy)
        .filter(|(_, e)| **e > 0.0)
        .map(|(t, e)| (*t, e.ln()))
        .unzip();
    if t.len() < 3 {
        return None;
    }
    Some(linear_fit(&t, &le).1)
}

/// β at which the trap torque balances the static spin torque for fixed α
/// (Newton iteration from β = 0).
pub fn equilibrium_beta(
    trap: &TrapModel,
    field: &dyn FrictionField,
    alpha: f64,
    potential: Potential,
) -> Result<f64> {
    let net = |b: f64| potential.torque(trap, b) + field.at(alpha, b).m_beta_0;
    let k = trap.trap_stiffness_k;
    if !(k > 0.0) {
        return Err(Error::Invalid("trap has no restoring stiffness".into()));
    }
    let fd = 1e-7;
    let mut beta = 0.0;
    for _ in 0..100 {
        let f = net(beta);
        let slope = (net(beta + fd) - net(beta - fd)) / (2.0 * fd);
        if !(slope < 0.0) {
            return Err(Error::Invalid("static equilibrium is not stable".into()));
        }
        // damp steps larger than a tenth of a radian
        let step = (-f / slope).clamp(-0.1, 0.1);
        beta += step;
        if step.abs() <= 1e-14 * beta.abs().max(1e-10) {
            return Ok(beta);
        }
    }
    Err(Error::Invalid("static equilibrium did not converge".into()))
}

pub(crate) struct EnergyRef {
    pub potential: Potential,
    pub beta_eq: f64,
    pub m_eq: f64,
    pub u_eq: f64,
}

impl EnergyRef {
    pub fn new(
        trap: &TrapModel,
        field: &dyn FrictionField,
        alpha: f64,
        potential: Potential,
    ) -> Result<Self> {
        let beta_eq = equilibrium_beta(trap, field, alpha, potential)?;
        Ok(EnergyRef {
            potential,
            beta_eq,
            m_eq: field.at(alpha, beta_eq).m_beta_0,
            u_eq: potential.energy(trap, beta_eq),
        })
    }

    /// ½I₁β̇² + U(β) − U(β_eq) − M_eq(β − β_eq)
    pub fn energy(&self, trap: &TrapModel, beta: f64, beta_dot: f64) -> f64 {
        0.5 * trap.inertia_i1 * beta_dot * beta_dot + self.potential.energy(trap, beta)
            - self.u_eq
            - self.m_eq * (beta - self.beta_eq)
    }
}

pub(crate) fn sample_times(t_span: (f64, f64), n: usize) -> Vec<f64> {
    let n = n.max(2);
    let (t0, t1) = t_span;
    (0..n)
        .map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Integrates I₁β̈ = −∂U/∂β + M_β⁰ − κ_αβα̇ − κ_ββ̇ with α̇ and ω₃ held
/// fixed and no noise.
pub fn integrate_deterministic(
    trap: &TrapModel,
    field: &dyn FrictionField,
    s0: RotorState,
    t_span: (f64, f64),
    opts: &DeterministicOptions,
) -> Result<RotorTrajectory> {
    let i1 = trap.inertia_i1;
    let alpha_dot = s0.alpha_dot;
    let omega3 = s0.spin_rate();
    let pot = opts.potential;
    let eref = EnergyRef::new(trap, field, s0.alpha, pot)?;

    let mut rhs = |_: f64, y: &[f64; 4]| {
        let (beta, beta_dot, alpha) = (y[0], y[1], y[2]);
        let fv = field.at(alpha, beta);
        let torque = pot.torque(trap, beta) + fv.m_beta_0
            - fv.kappa_alphabeta * alpha_dot
            - fv.kappa_beta * beta_dot;
        [
            beta_dot,
            torque / i1,
            alpha_dot,
            omega3 - alpha_dot * beta.cos(),
        ]
    };

    let times = sample_times(t_span, opts.samples);
    let mut ig = Dopri5::new(
        t_span.0,
        [s0.beta, s0.beta_dot, s0.alpha, s0.gamma_euler],
        opts.tol,
    );
    let mut out = RotorTrajectory {
        times: Vec::with_capacity(times.len()),
        states: Vec::with_capacity(times.len()),
        energy: Vec::with_capacity(times.len()),
        kappa_beta: Vec::with_capacity(times.len()),
        beta_eq: eref.beta_eq,
        untrapped: false,
    };
    for &t in &times {
        ig.advance_to(t, &mut rhs)?;
        let [beta, beta_dot, alpha, gamma] = ig.y;
        let state = RotorState {
            alpha,
            beta,
            gamma_euler: gamma,
            alpha_dot,
            beta_dot,
            gamma_dot: omega3 - alpha_dot * beta.cos(),
        };
        out.times.push(t);
        out.energy.push(eref.energy(trap, beta, beta_dot));
        out.kappa_beta.push(field.at(alpha, beta).kappa_beta);
        out.states.push(state.canonical());
        if beta.abs() > opts.escape_bound {
            out.untrapped = true;
            break;
        }
    }
    Ok(out)
}
