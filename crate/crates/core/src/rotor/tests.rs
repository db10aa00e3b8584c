use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::consts::{K_B, PLANCK_H};
use crate::params::{derive_trap, SystemConfig, TrapModel};
use crate::spin::{
    build_hamiltonian, evolve_master, steady_state_analytic, MasterOptions, Rates, SpinState,
};
use crate::units::RateConvention;

fn paper() -> SystemConfig {
    SystemConfig::paper(RateConvention::Angular)
}

fn paper_trap() -> TrapModel {
    derive_trap(&paper()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn canonical_reflects_through_pole() {
    let s = RotorState {
        alpha: 0.3,
        beta: -0.1,
        gamma_euler: 1.0,
        alpha_dot: 2.0,
        beta_dot: 5.0,
        gamma_dot: 1.0,
    };
    let c = s.canonical();
    assert!((c.beta - 0.1).abs() < 1e-15);
    assert!((c.alpha - (0.3 + PI)).abs() < 1e-15);
    assert!((c.gamma_euler - (1.0 + PI)).abs() < 1e-15);
    assert_eq!(c.beta_dot, -5.0);
    assert_eq!(c.spin_rate(), s.spin_rate());
}

#[test]
fn undamped_harmonic_libration() {
    let trap = paper_trap();
    let w0 = trap.libration_freq_omega0;
    let b0 = 0.02;
    let t_end = 200.0 * 2.0 * PI / w0;
    let field = ConstantField(FieldValue::default());
    let s0 = RotorState {
        alpha_dot: 3e3,
        gamma_dot: 1e4,
        ..RotorState::at_rest(0.0, b0)
    };
    let opts = DeterministicOptions {
        tol: crate::ode::Tolerances::default()
            .with_rtol(1e-12)
            .with_atol(1e-16),
        ..Default::default()
    };
    let tr = integrate_deterministic(&trap, &field, s0, (0.0, t_end), &opts).unwrap();
    let e0 = tr.energy[0];
    for (t, (e, s)) in tr.times.iter().zip(tr.energy.iter().zip(&tr.states)) {
        assert!(rel(*e, e0) < 1e-9, "energy drift {} at {t}", rel(*e, e0));
        assert!(rel(s.spin_rate(), s0.spin_rate()) < 1e-12);
    }
    // the phase after 200 periods pins the frequency far below 1e-6
    let beta_end = integrate_deterministic(
        &trap,
        &field,
        RotorState::at_rest(0.0, b0),
        (0.0, t_end),
        &DeterministicOptions::default(),
    )
    .unwrap();
    let b_end = beta_end.states.last().unwrap().beta;
    assert!((b_end - b0 * (w0 * t_end).cos()).abs() < 1e-6 * b0 * w0 * t_end / 100.0);
}

#[test]
fn imposed_friction_gives_paper_damping_time() {
    let trap = paper_trap();
    let kappa = 500.0 * PLANCK_H;
    let predicted = trap.inertia_i1 / kappa;
    assert!(rel(predicted, 2.8e-4) < 0.05);
    let s0 = RotorState::at_rest(0.0, 0.0).with_beta_dot(0.01 * trap.libration_freq_omega0);
    let tr = integrate_deterministic(
        &trap,
        &ConstantField::kappa_only(kappa),
        s0,
        (0.0, 3.0 * predicted),
        &DeterministicOptions::default(),
    )
    .unwrap();
    let fit = tr.damping_time_fit().unwrap();
    assert!(rel(fit, predicted) < 1e-3, "{fit} vs {predicted}");
}

#[test]
fn position_dependent_friction_self_consistent() {
    let cfg = paper();
    let trap = paper_trap();
    let field = AnalyticField::new(&cfg);
    let s0 = RotorState::at_rest(0.0, 2f64.to_radians());
    let guess = trap.inertia_i1 / field.at(0.0, 0.0).kappa_beta;
    let opts = DeterministicOptions {
        samples: 4001,
        ..Default::default()
    };
    let tr = integrate_deterministic(&trap, &field, s0, (0.0, 2.0 * guess), &opts).unwrap();
    let fit = tr.damping_time_fit().unwrap();
    let pred = trap.inertia_i1 / tr.kappa_power_mean();
    assert!(rel(fit, pred) < 0.3, "{fit} vs {pred}");
    assert!(!tr.untrapped);
}

#[test]
fn full_potential_escape_is_flagged() {
    let trap = paper_trap();
    let kick = 3.0 * (2.0 * trap.trap_depth / trap.inertia_i1).sqrt();
    let s0 = RotorState::at_rest(0.0, 0.0).with_beta_dot(kick);
    let opts = DeterministicOptions {
        potential: Potential::Full,
        ..Default::default()
    };
    let tr = integrate_deterministic(
        &trap,
        &ConstantField(FieldValue::default()),
        s0,
        (0.0, 1e-5),
        &opts,
    )
    .unwrap();
    assert!(tr.untrapped);
}

#[test]
fn equilibrium_balances_static_torque() {
    let cfg = paper();
    let trap = paper_trap();
    let field = AnalyticField::new(&cfg);
    let b = equilibrium_beta(&trap, &field, 0.0, Potential::Harmonic).unwrap();
    let net = -trap.trap_stiffness_k * b + field.at(0.0, b).m_beta_0;
    assert!(net.abs() < 1e-12 * field.at(0.0, b).m_beta_0.abs());
    assert!(b > 0.0 && b < 1e-5);
}

#[test]
fn clamped_coupled_run_is_plain_master_equation() {
    let cfg = paper();
    let trap = paper_trap();
    let (a, b) = (0.4, 3f64.to_radians());
    let h = build_hamiltonian(&cfg, a, b, 0.0);
    let rates = Rates::from_config(&cfg);
    let t_end = 2e-5;
    let opts = CoupledOptions {
        clamped: true,
        samples: 11,
        ..Default::default()
    };
    let tr = integrate_coupled(
        &cfg,
        &trap,
        RotorState::at_rest(a, b),
        &SpinState::ground(),
        (0.0, t_end),
        &opts,
    )
    .unwrap();
    let plain = evolve_master(
        &SpinState::ground(),
        |_| h,
        rates,
        0.0,
        &tr.times,
        &MasterOptions::default(),
    )
    .unwrap();
    for (x, y) in tr.spin.iter().zip(&plain.states) {
        assert!((x.rho - y.rho).norm() < 1e-9);
    }
    assert_eq!(tr.rotor.last().unwrap().beta, b);
}

fn slow_trap() -> (SystemConfig, TrapModel) {
    let mut cfg = paper();
    cfg.laser_power = 1e-6;
    let trap = derive_trap(&cfg).unwrap();
    (cfg, trap)
}

#[test]
fn coupled_damping_matches_friction_in_slow_trap() {
    let (cfg, trap) = slow_trap();
    let field = AnalyticField::new(&cfg);
    let beq = equilibrium_beta(&trap, &field, 0.0, Potential::Harmonic).unwrap();
    let kappa = field.at(0.0, beq).kappa_beta;
    let tau = trap.inertia_i1 / kappa;
    let s0 = RotorState::at_rest(0.0, beq).with_beta_dot(1e-4 * trap.libration_freq_omega0);
    let spin0 = steady_state_analytic(
        &build_hamiltonian(&cfg, 0.0, beq, 0.0),
        &Rates::from_config(&cfg),
    )
    .to_state();
    let tr = integrate_coupled(
        &cfg,
        &trap,
        s0,
        &spin0,
        (0.0, 1.5 * tau),
        &CoupledOptions::default(),
    )
    .unwrap();
    let fit = tr.damping_time_fit().unwrap();
    assert!(rel(fit, tau) < 0.1, "{fit} vs {tau}");
}

#[test]
fn anti_damping_grows_energy() {
    let (cfg, trap) = slow_trap();
    let cfg = cfg.clone().with_rest_detuning(-2.0 * cfg.dephase_rate);
    let field = AnalyticField::new(&cfg);
    assert!(field.at(0.0, 0.0).kappa_beta < 0.0);
    let s0 = RotorState::at_rest(0.0, 0.0).with_beta_dot(1e-4 * trap.libration_freq_omega0);
    let spin0 = steady_state_analytic(
        &build_hamiltonian(&cfg, 0.0, 0.0, 0.0),
        &Rates::from_config(&cfg),
    )
    .to_state();
    let opts = CoupledOptions {
        samples: 401,
        ..Default::default()
    };
    let tr = integrate_coupled(&cfg, &trap, s0, &spin0, (0.0, 5e-4), &opts).unwrap();
    assert!(tr.energy_rate().unwrap() > 0.0);
    assert!(tr.energy.last().unwrap() > &tr.energy[0]);
}

fn synthetic(t_target: f64) -> LangevinModel {
    let inertia = 1e-34;
    let omega0 = 1e5;
    let kappa = inertia * 2e3;
    LangevinModel {
        inertia,
        stiffness: inertia * omega0 * omega0,
        kappa,
        d_p: t_target * K_B * kappa,
        beta_eq: 0.0,
    }
}

#[test]
fn ornstein_uhlenbeck_small_ensemble() {
    let m = synthetic(1e-4);
    let opts = EnsembleOptions::for_model(&m, 40, 7);
    let r = langevin_ensemble(&m, &opts).unwrap();
    assert!(rel(r.effective_temperature, 1e-4) < 0.1, "{r:?}");
    assert!(r.effective_temperature_stderr > 0.0);
    assert!(
        (r.kinetic_temperature - r.potential_temperature).abs()
            < 4.0
                * r.kinetic_temperature_stderr
                    .hypot(r.potential_temperature_stderr)
    );
}

#[test]
fn no_noise_cools_to_zero() {
    let m = synthetic(0.0);
    let mut opts = EnsembleOptions::for_model(&m, 4, 1);
    assert_eq!(
        langevin_ensemble(&m, &opts).unwrap().effective_temperature,
        0.0
    );
    opts.beta0 = 1e-3;
    let t_start = 0.5 * m.stiffness * opts.beta0 * opts.beta0 / K_B;
    let r = langevin_ensemble(&m, &opts).unwrap();
    assert!(r.effective_temperature > 0.0 && r.effective_temperature < 1e-3 * t_start);
}

#[test]
fn ensemble_is_deterministic() {
    let m = synthetic(1e-4);
    let mut opts = EnsembleOptions::for_model(&m, 6, 99);
    opts.window *= 0.1;
    let a = langevin_ensemble(&m, &opts).unwrap();
    let b = langevin_ensemble(&m, &opts).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    opts.seed = 100;
    let c = langevin_ensemble(&m, &opts).unwrap();
    assert_ne!(a.effective_temperature, c.effective_temperature);
}

#[test]
fn ensemble_rejects_bad_inputs() {
    let m = synthetic(1e-4);
    let mut opts = EnsembleOptions::for_model(&m, 2, 0);
    opts.dt = 0.2 / m.omega0();
    assert!(matches!(
        langevin_ensemble(&m, &opts),
        Err(crate::Error::CoarseTimeStep(_))
    ));
    let mut bad = m;
    bad.d_p = -1.0;
    let opts = EnsembleOptions::for_model(&m, 2, 0);
    assert!(matches!(
        langevin_ensemble(&bad, &opts),
        Err(crate::Error::NonPositiveDiffusion(_))
    ));
}

proptest! {
    #[test]
    fn canonical_is_idempotent(alpha in -20.0f64..20.0, beta in -10.0f64..10.0, gamma in -20.0f64..20.0) {
        let s = RotorState { alpha, beta, gamma_euler: gamma, ..RotorState::at_rest(0.0, 0.0) };
        let c = s.canonical();
        prop_assert!((0.0..=PI).contains(&c.beta));
        prop_assert!((0.0..2.0 * PI).contains(&c.alpha));
        let cc = c.canonical();
        prop_assert!((cc.beta - c.beta).abs() < 1e-12);
        prop_assert!((cc.alpha - c.alpha).abs() < 1e-12);
    }
}
