use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use proptest::prelude::*;

use super::*;
use crate::consts::{HBAR, K_B, PLANCK_H};
use crate::params::SystemConfig;
use crate::spin::{build_hamiltonian, steady_state_analytic, Rates, SpinState};
use crate::units::RateConvention;

fn paper() -> SystemConfig {
    SystemConfig::paper(RateConvention::Angular)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn no_alpha_torque_without_microwave() {
    let mut cfg = paper();
    cfg.zeeman_b1 = 0.0;
    let h = build_hamiltonian(&cfg, 0.7, 0.1, 0.0);
    let state = SpinState::from_two_level(0.3, num_complex::Complex64::new(0.1, -0.2));
    assert_eq!(torque_expectation(&h, &state, &cfg).0, 0.0);
}

#[test]
fn ground_state_has_no_zeeman_torque() {
    let mut cfg = paper();
    cfg.zeeman_b1 = 0.0;
    let h = build_hamiltonian(&cfg, 0.3, 0.05, 0.0);
    assert_eq!(torque_expectation(&h, &SpinState::ground(), &cfg).1, 0.0);
}

#[test]
fn torque_is_energy_gradient() {
    let cfg = paper();
    let (a, b) = (0.0, 2f64.to_radians());
    let h = build_hamiltonian(&cfg, a, b, 0.0);
    let s = steady_state_analytic(&h, &Rates::from_config(&cfg)).to_state();
    let (_, m) = torque_expectation(&h, &s, &cfg);
    let fd = steady_energy_gradient(&cfg, a, b, &s, 1e-5);
    assert!(rel(fd, m) < 1e-6, "{fd} vs {m}");
    // α torque too, generic orientation
    let h = build_hamiltonian(&cfg, 0.9, b, 0.0);
    let s = steady_state_analytic(&h, &Rates::from_config(&cfg)).to_state();
    let (ma, _) = torque_expectation(&h, &s, &cfg);
    assert!(ma.is_finite());
}

#[test]
fn kappa_alphabeta_vanishes_on_symmetry_planes() {
    let cfg = paper();
    for a in [0.0, PI] {
        for deg in [1.0, 4.0, 8.0] {
            let r = friction_analytic(&cfg, a, f64::to_radians(deg)).unwrap();
            assert!(r.kappa_alphabeta.abs() <= 1e-16 * r.kappa_beta.abs());
        }
    }
    let r = friction_analytic(&cfg, 1.0, 0.0).unwrap();
    assert_eq!(r.kappa_alphabeta, 0.0);
}

#[test]
fn kappa_alphabeta_antisymmetric() {
    let cfg = paper();
    let b = 4f64.to_radians();
    let k1 = friction_analytic(&cfg, PI / 3.0, b)
        .unwrap()
        .kappa_alphabeta;
    let k2 = friction_analytic(&cfg, 5.0 * PI / 3.0, b)
        .unwrap()
        .kappa_alphabeta;
    assert!((k1 + k2).abs() <= 1e-12 * k1.abs());
}

#[test]
fn zero_impulse() {
    let cfg = paper();
    for deg in [2.0, 4.0, 8.0] {
        let c = alpha_impulse_integral(&cfg, f64::to_radians(deg)).unwrap();
        assert!(c.max_abs > 0.0);
        assert!(c.relative() < 1e-8, "{c:?}");
    }
    assert_eq!(alpha_impulse_integral(&cfg, 0.0).unwrap().max_abs, 0.0);
}

#[test]
fn fig4_curve_positive_and_scaled() {
    let cfg = paper();
    for a in [0.0, PI] {
        for i in 0..=16 {
            let r = friction_analytic(&cfg, a, f64::to_radians(0.5 * i as f64)).unwrap();
            assert_eq!(r.region, Region::Damping);
            assert!(r.kappa_beta > 0.0);
            assert!(
                (10.0..1e3).contains(&r.kappa_beta_h()),
                "{}",
                r.kappa_beta_h()
            );
        }
    }
    let r0 = friction_analytic(&cfg, 0.0, 0.0).unwrap();
    let rp = friction_analytic(&cfg, PI, 0.0).unwrap();
    assert_eq!(r0.kappa_beta, rp.kappa_beta);
}

#[test]
fn anti_damping_beyond_crossing() {
    let cfg = paper();
    let r = friction_analytic(&cfg, 0.0, 12f64.to_radians()).unwrap();
    assert_eq!(r.region, Region::AntiDamping);
    assert!(r.kappa_beta < 0.0);
    assert!(r.t_f.is_none());
}

#[test]
fn dark_state_is_an_error() {
    let mut cfg = paper();
    cfg.zeeman_b1 = 0.0;
    assert!(matches!(
        friction_analytic(&cfg, 0.0, 0.1),
        Err(crate::Error::DarkState)
    ));
}

#[test]
fn a1_is_doppler_derivative_of_relaxation_rate() {
    let cfg = paper();
    let (a, b) = (0.4, 3f64.to_radians());
    let r = friction_analytic(&cfg, a, b).unwrap();
    let rates = Rates::from_config(&cfg);
    let relax = |adot: f64| {
        let f = steady_state_analytic(&build_hamiltonian(&cfg, a, b, adot), &rates)
            .f0()
            .unwrap();
        (2.0 + f) * rates.pump / f
    };
    let step = 1e2;
    let fd = (relax(step) - relax(-step)) / (2.0 * step);
    assert!(rel(fd, r.a1) < 1e-6, "{fd} vs {}", r.a1);
}

#[test]
fn temperature_minimum_at_gamma1() {
    let mut cfg = paper();
    cfg.zeeman_b1 = 2e4;
    let g1 = cfg.dephase_rate;
    let c = cfg.clone().with_rest_detuning(g1);
    let r = friction_analytic(&c, 0.0, 0.0).unwrap();
    assert!(r.f0 >= 1e4);
    let two_g1 = 2.0 * HBAR * g1 / K_B;
    assert!(rel(r.t_f_closed_form.unwrap(), two_g1) < 1e-3);
    assert!(rel(r.t_f_large_f0.unwrap(), two_g1) < 1e-14);
    // D_p/κ_β is half the closed form for every f₀
    assert!(rel(2.0 * r.t_f.unwrap(), r.t_f_closed_form.unwrap()) < 1e-12);
    for x in [0.8, 0.95, 1.05, 1.25] {
        let rx = friction_analytic(&cfg.clone().with_rest_detuning(x * g1), 0.0, 0.0).unwrap();
        assert!(rx.t_f_closed_form.unwrap() > r.t_f_closed_form.unwrap());
    }
}

#[test]
fn large_f0_asymptotics() {
    let g1 = paper().dephase_rate;
    for (b1, target) in [(2e5, 1e-2), (2e4, 1e-4)] {
        let mut cfg = paper().with_rest_detuning(2.0 * g1);
        cfg.zeeman_b1 = b1;
        let r = friction_analytic(&cfg, 0.0, 0.0).unwrap();
        let err = rel(r.t_f_large_f0.unwrap(), r.t_f_closed_form.unwrap());
        assert!(err < 2.0 * target && err > 0.0, "f0 {} err {err}", r.f0);
        assert!(rel(err, 1.0 / (1.0 + r.f0)) < 1e-9);
    }
}

#[test]
fn nv_scaling_is_exact() {
    let one = paper();
    let r1 = friction_analytic(&one, 0.3, 0.05).unwrap();
    for n in [2u32, 4, 7] {
        let mut c = one.clone();
        c.nv_count = n;
        let rn = friction_analytic(&c, 0.3, 0.05).unwrap();
        let nf = f64::from(n);
        assert_eq!(rn.kappa_beta, nf * r1.kappa_beta);
        assert_eq!(rn.kappa_alphabeta, nf * r1.kappa_alphabeta);
        assert_eq!(rn.d_p, nf * r1.d_p);
        assert_eq!(rn.t_f, r1.t_f);
    }
}

#[test]
fn exact_linear_response_close_to_analytic() {
    let cfg = paper();
    for (a, deg) in [(0.0, 4.0), (PI, 4.0), (FRAC_PI_4, 2.0), (FRAC_PI_2, 6.0)] {
        let b = f64::to_radians(deg);
        let lr = linear_response_friction(&cfg, a, b).unwrap();
        let an = friction_analytic(&cfg, a, b).unwrap();
        let ad = friction_adiabatic(&cfg, a, b).unwrap();
        assert!(
            rel(an.kappa_beta, lr.kappa_beta) < 0.06,
            "{a} {deg}: {} {}",
            an.kappa_beta,
            lr.kappa_beta
        );
        // keeping the drive's β dependence does not move the value far
        assert!(rel(ad.1, an.kappa_beta) < 0.05);
    }
}

#[test]
fn dynamic_friction_rolls_off() {
    let cfg = paper();
    let b = 3f64.to_radians();
    let k0 = linear_response_friction(&cfg, 0.0, b).unwrap().kappa_beta;
    let (_, kslow) = dynamic_friction(&cfg, 0.0, b, 1e2).unwrap();
    let (_, kfast) = dynamic_friction(&cfg, 0.0, b, 1e8).unwrap();
    assert!(rel(kslow.re, k0) < 1e-6);
    assert!(kfast.re.abs() < 0.01 * k0);
}

#[test]
fn oracle_matches_exact_linear_response() {
    let cfg = paper();
    let (a, b) = (0.0, 4f64.to_radians());
    let v = OracleOptions::auto_rate(&cfg, a, b);
    let o = friction_numeric_oracle(&cfg, a, b, 0.0, v, &OracleOptions::default()).unwrap();
    let lr = linear_response_friction(&cfg, a, b).unwrap();
    assert!(
        rel(o.kappa_beta, lr.kappa_beta) < 1e-3,
        "{} vs {}",
        o.kappa_beta,
        lr.kappa_beta
    );
    assert!(o.resolved_beta && o.nonlinearity_beta < 0.05);
    // at α = 0 the only α̇ response is the Doppler term, far below κ_β
    assert!(lr.kappa_alphabeta.abs() < 1e-3 * lr.kappa_beta);

    let a = 1.0;
    let o = friction_numeric_oracle(&cfg, a, b, v, v, &OracleOptions::default()).unwrap();
    let lr = linear_response_friction(&cfg, a, b).unwrap();
    assert!(o.resolved_alpha);
    assert!(
        rel(o.kappa_alphabeta, lr.kappa_alphabeta) < 1e-3,
        "{} vs {}",
        o.kappa_alphabeta,
        lr.kappa_alphabeta
    );
    assert!(rel(o.kappa_beta, lr.kappa_beta) < 1e-3);
}

#[test]
fn oracle_at_rest_recovers_static_torque() {
    let cfg = paper();
    let (a, b) = (0.5, 2f64.to_radians());
    let o = friction_numeric_oracle(&cfg, a, b, 0.0, 0.0, &OracleOptions::default()).unwrap();
    assert_eq!(o.kappa_beta, 0.0);
    let r = friction_analytic(&cfg, a, b).unwrap();
    assert!(rel(o.m_beta_0, r.m_beta_0) < 1e-7);
}

#[test]
fn oracle_rejects_large_velocity() {
    let cfg = paper();
    let b = 4f64.to_radians();
    let v = 1e4 * OracleOptions::auto_rate(&cfg, 0.0, b);
    let e = friction_numeric_oracle(&cfg, 0.0, b, 0.0, v, &OracleOptions::default());
    assert!(matches!(e, Err(crate::Error::Nonlinear { .. })), "{e:?}");
}

#[test]
fn correlation_and_quadrature() {
    let cfg = paper();
    let c = correlation_and_diffusion(&cfg, 0.0, 2f64.to_radians()).unwrap();
    assert_eq!(c.g_analytic[0], c.g0);
    assert!(rel(c.g_regression[0], c.g0) < 1e-12);
    assert!(rel(c.d_p_quadrature, c.d_p) < 1e-6);
    let r = friction_analytic(&cfg, 0.0, 2f64.to_radians()).unwrap();
    assert!(rel(c.d_p, r.d_p) < 1e-12);
    assert!(
        rel(c.d_p_regression, c.d_p) < 0.1,
        "{} vs {}",
        c.d_p_regression,
        c.d_p
    );
}

#[test]
fn kappa_h_units() {
    let r = friction_analytic(&paper(), 0.0, 0.0).unwrap();
    assert_eq!(r.kappa_beta_h(), r.kappa_beta / PLANCK_H);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn saturation_identity(f0 in 1e-3f64..1e8) {
        let p = 1.0 / (2.0 + f0);
        let lhs = (2.0 + f0).powi(2) * (p - p * p);
        prop_assert!((lhs - (1.0 + f0)).abs() <= 8.0 * f64::EPSILON * (1.0 + f0));
    }

    #[test]
    fn temperature_ignores_static_field_scale(
        delta in 1e5f64..5e7,
        b1 in 1e4f64..1e7,
        alpha in 0.0f64..std::f64::consts::TAU,
    ) {
        let mut c1 = paper().with_rest_detuning(delta);
        c1.zeeman_b1 = b1;
        let mut c2 = c1.clone();
        c2.zeeman_b0 *= 2.0;
        let t1 = friction_analytic(&c1, alpha, 0.0).unwrap();
        let t2 = friction_analytic(&c2, alpha, 0.0).unwrap();
        prop_assert!(rel(t1.t_f.unwrap(), t2.t_f.unwrap()) < 1e-12);
        prop_assert!(rel(t1.t_f_closed_form.unwrap(), t2.t_f_closed_form.unwrap()) < 1e-12);
    }

    #[test]
    fn friction_sign_follows_detuning(alpha in 0.0f64..std::f64::consts::TAU, beta in 0.0f64..0.7) {
        let r = friction_analytic(&paper(), alpha, beta).unwrap();
        if r.region == Region::Damping {
            prop_assert!(r.kappa_beta >= 0.0);
        }
        if r.delta_plus < 0.0 {
            prop_assert!(r.kappa_beta <= 0.0);
        }
    }
}
