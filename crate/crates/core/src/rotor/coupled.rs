use super::deterministic::{energy_rate, sample_times, EnergyRef, Potential};
use super::field::AnalyticField;
use super::state::RotorState;
use crate::error::Result;
use crate::ode::{Dopri5, Tolerances};
use crate::params::{SystemConfig, TrapModel};
use crate::response::torque_expectation;
use crate::spin::master::two_level_rhs;
use crate::spin::{build_hamiltonian, Rates, SpinState};

#[derive(Debug, Clone, Copy)]
pub struct CoupledOptions {
    pub potential: Potential,
    pub tol: Tolerances,
    pub samples: usize,
    /// Infinite-inertia limit: the angles follow their initial rates and the
    /// spin torque does no work.
    pub clamped: bool,
}

impl Default for CoupledOptions {
    fn default() -> Self {
        CoupledOptions {
            potential: Potential::Harmonic,
            tol: Tolerances::default().with_rtol(1e-9).with_atol(1e-13),
            samples: 2001,
            clamped: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoupledTrajectory {
    pub times: Vec<f64>,
    pub rotor: Vec<RotorState>,
    pub spin: Vec<SpinState>,
    /// Libration energy about the biased equilibrium, J.
    pub energy: Vec<f64>,
    pub beta_eq: f64,
}

impl CoupledTrajectory {
    pub fn energy_rate(&self) -> Option<f64> {
        energy_rate(&self.times, &self.energy)
    }

    pub fn damping_time_fit(&self) -> Option<f64> {
        self.energy_rate().filter(|r| *r < 0.0).map(|r| -1.0 / r)
    }
}

/// Integrates the two-level master equation and the β equation together,
/// with the instantaneous ⟨M_β⟩ (times the NV count) as the spin torque.
pub fn integrate_coupled(
    cfg: &SystemConfig,
    trap: &TrapModel,
    s0: RotorState,
    spin0: &SpinState,
    t_span: (f64, f64),
    opts: &CoupledOptions,
) -> Result<CoupledTrajectory> {
    let rates = Rates::from_config(cfg);
    let i1 = trap.inertia_i1;
    let n = f64::from(cfg.nv_count);
    let alpha_dot = s0.alpha_dot;
    let omega3 = s0.spin_rate();
    let pot = opts.potential;
    let eref = EnergyRef::new(trap, &AnalyticField::new(cfg), s0.alpha, pot)?;

    let mut rhs = |_: f64, y: &[f64; 7]| {
        let (beta, beta_dot, alpha) = (y[0], y[1], y[2]);
        let h = build_hamiltonian(cfg, alpha, beta, alpha_dot);
        let bloch = [y[4], y[5], y[6]];
        let ds = two_level_rhs(&h, &rates, &bloch);
        let beta_ddot = if opts.clamped {
            0.0
        } else {
            let (_, m_beta) = torque_expectation(&h, &SpinState::from_bloch(&bloch), cfg);
            (pot.torque(trap, beta) + n * m_beta) / i1
        };
        [
            beta_dot,
            beta_ddot,
            alpha_dot,
            omega3 - alpha_dot * beta.cos(),
            ds[0],
            ds[1],
            ds[2],
        ]
    };

    let b = spin0.to_bloch();
    let y0 = [
        s0.beta,
        s0.beta_dot,
        s0.alpha,
        s0.gamma_euler,
        b[0],
        b[1],
        b[2],
    ];
    let times = sample_times(t_span, opts.samples);
    let mut ig = Dopri5::new(t_span.0, y0, opts.tol);
    let mut out = CoupledTrajectory {
        times: Vec::with_capacity(times.len()),
        rotor: Vec::with_capacity(times.len()),
        spin: Vec::with_capacity(times.len()),
        energy: Vec::with_capacity(times.len()),
        beta_eq: eref.beta_eq,
    };
    for &t in &times {
        ig.advance_to(t, &mut rhs)?;
        let y = ig.y;
        let state = RotorState {
            alpha: y[2],
            beta: y[0],
            gamma_euler: y[3],
            alpha_dot,
            beta_dot: y[1],
            gamma_dot: omega3 - alpha_dot * y[0].cos(),
        };
        out.times.push(t);
        out.energy.push(eref.energy(trap, y[0], y[1]));
        out.rotor.push(state.canonical());
        out.spin.push(SpinState::from_bloch(&[y[4], y[5], y[6]]));
    }
    Ok(out)
}
