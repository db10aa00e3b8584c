use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::deterministic::{equilibrium_beta, Potential};
use super::field::FrictionField;
use crate::consts::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::params::TrapModel;
use crate::stats::mean_and_stderr;

/// Linearised libration about the biased equilibrium with constant spin
/// friction and white torque noise of intensity 2D_p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LangevinModel {
    /// I₁, kg·m²
    pub inertia: f64,
    /// k, J/rad²
    pub stiffness: f64,
    /// κ_β, J·s
    pub kappa: f64,
    /// D_p, J²·s
    pub d_p: f64,
    /// Equilibrium offset M_β⁰/k, rad.
    pub beta_eq: f64,
}

impl LangevinModel {
    /// Coefficients of `field` at the static equilibrium for fixed α.
    pub fn from_field(trap: &TrapModel, field: &dyn FrictionField, alpha: f64) -> Result<Self> {
        let beta_eq = equilibrium_beta(trap, field, alpha, Potential::Harmonic)?;
        let fv = field.at(alpha, beta_eq);
        Ok(LangevinModel {
            inertia: trap.inertia_i1,
            stiffness: trap.trap_stiffness_k,
            kappa: fv.kappa_beta,
            d_p: fv.d_p,
            beta_eq,
        })
    }

    pub fn omega0(&self) -> f64 {
        (self.stiffness / self.inertia).sqrt()
    }

    /// κ_β/I₁, 1/s
    pub fn damping_rate(&self) -> f64 {
        self.kappa / self.inertia
    }

    /// D_p/(k_B κ_β), K
    pub fn predicted_temperature(&self) -> Option<f64> {
        (self.kappa > 0.0).then(|| self.d_p / (K_B * self.kappa))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleOptions {
    pub n_traj: usize,
    pub seed: u64,
    /// s
    pub dt: f64,
    /// Discarded lead-in, s.
    pub burn_in: f64,
    /// Averaging window after the burn-in, s.
    pub window: f64,
    /// Initial displacement from equilibrium, rad.
    pub beta0: f64,
    /// Initial β̇, rad/s.
    pub beta_dot0: f64,
}

impl EnsembleOptions {
    /// Step of 0.05/max(ω₀, κ/I₁), burn-in 8 and window 40 damping times.
    pub fn for_model(model: &LangevinModel, n_traj: usize, seed: u64) -> Self {
        let rate = model.damping_rate();
        EnsembleOptions {
            n_traj,
            seed,
            dt: 0.05 / model.omega0().max(rate),
            burn_in: 8.0 / rate,
            window: 40.0 / rate,
            beta0: 0.0,
            beta_dot0: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoolingReport {
    /// Energy e-folding time from a deterministic run, when one was made, s.
    pub damping_time_fit: Option<f64>,
    /// I₁/κ_β, s
    pub damping_time_predicted: f64,
    /// Mean of the kinetic and configurational estimates, K.
    pub effective_temperature: f64,
    pub effective_temperature_stderr: f64,
    /// I₁⟨β̇²⟩/k_B
    pub kinetic_temperature: f64,
    pub kinetic_temperature_stderr: f64,
    /// k⟨(β − β_eq)²⟩/k_B
    pub potential_temperature: f64,
    pub potential_temperature_stderr: f64,
    /// D_p/(k_B κ_β), K
    pub predicted_t_f: Option<f64>,
    /// ħω₀/k_B, K
    pub quantum_threshold: f64,
    /// k_B T_eff/(ħω₀) − ½
    pub occupation: f64,
    pub ensemble_size: usize,
    pub seed: u64,
    pub dt: f64,
    pub burn_in: f64,
    pub window: f64,
    pub beta_eq: f64,
}

struct TrajStats {
    kinetic: f64,
    potential: f64,
}

fn run_trajectory(
    model: &LangevinModel,
    opts: &EnsembleOptions,
    index: usize,
    n_burn: u64,
    n_win: u64,
) -> TrajStats {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index as u64);
    let dt = opts.dt;
    let a = dt / model.inertia;
    let damp = 1.0 / (1.0 + dt * model.damping_rate());
    let noise = (2.0 * model.d_p * dt).sqrt() / model.inertia;
    let k = model.stiffness;
    // displacement from equilibrium; the constant static torque is absorbed
    let (mut x, mut v) = (opts.beta0, opts.beta_dot0);
    let step = |x: &mut f64, v: &mut f64, rng: &mut ChaCha8Rng| {
        let n: f64 = rng.sample(StandardNormal);
        *v = (*v - a * k * *x + noise * n) * damp;
        *x += dt * *v;
    };
    for _ in 0..n_burn {
        step(&mut x, &mut v, &mut rng);
    }
    let (mut sv, mut sx) = (0.0, 0.0);
    for _ in 0..n_win {
        step(&mut x, &mut v, &mut rng);
        sv += v * v;
        sx += x * x;
    }
    let n = n_win as f64;
    TrajStats {
        kinetic: model.inertia * sv / n / K_B,
        potential: k * sx / n / K_B,
    }
}

/// Ensemble of semi-implicit Euler–Maruyama trajectories; each one draws from
/// its own ChaCha8 stream (master seed, trajectory index), so the report does
/// not depend on the thread schedule.
pub fn langevin_ensemble(model: &LangevinModel, opts: &EnsembleOptions) -> Result<CoolingReport> {
    if opts.n_traj == 0 {
        return Err(Error::Invalid("n_traj must be at least 1".into()));
    }
    let w0 = model.omega0();
    let resolution = opts.dt * w0.max(model.damping_rate());
    if !(resolution <= 0.1) {
        return Err(Error::CoarseTimeStep(resolution));
    }
    if !(model.kappa > 0.0) {
        return Err(Error::Invalid(
            "kappa_beta <= 0: no stationary state (anti-damping)".into(),
        ));
    }
    if !(model.d_p >= 0.0) {
        return Err(Error::NonPositiveDiffusion(model.d_p));
    }
    if !(opts.window > 0.0) || !(opts.burn_in >= 0.0) {
        return Err(Error::Invalid("window must be > 0 and burn_in >= 0".into()));
    }
    let n_burn = (opts.burn_in / opts.dt).round() as u64;
    let n_win = ((opts.window / opts.dt).round() as u64).max(1);

    let stats: Vec<TrajStats> = (0..opts.n_traj)
        .into_par_iter()
        .map(|i| run_trajectory(model, opts, i, n_burn, n_win))
        .collect();
    let kin: Vec<f64> = stats.iter().map(|s| s.kinetic).collect();
    let pot: Vec<f64> = stats.iter().map(|s| s.potential).collect();
    let both: Vec<f64> = stats
        .iter()
        .map(|s| 0.5 * (s.kinetic + s.potential))
        .collect();
    let (tk, ek) = mean_and_stderr(&kin);
    let (tp, ep) = mean_and_stderr(&pot);
    let (t, e) = mean_and_stderr(&both);
    let hw = HBAR * w0;
    Ok(CoolingReport {
        damping_time_fit: None,
        damping_time_predicted: 1.0 / model.damping_rate(),
        effective_temperature: t,
        effective_temperature_stderr: e,
        kinetic_temperature: tk,
        kinetic_temperature_stderr: ek,
        potential_temperature: tp,
        potential_temperature_stderr: ep,
        predicted_t_f: model.predicted_temperature(),
        quantum_threshold: hw / K_B,
        occupation: K_B * t / hw - 0.5,
        ensemble_size: opts.n_traj,
        seed: opts.seed,
        dt: opts.dt,
        burn_in: opts.burn_in,
        window: opts.window,
        beta_eq: model.beta_eq,
    })
}
