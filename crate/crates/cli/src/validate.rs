//! Analytic-versus-numeric cross-checks, run under both rate conventions.

use std::f64::consts::PI;

use serde::Serialize;
use serde_json::{json, Value};

use nvcool_core::consts::{HBAR, K_B};
use nvcool_core::params::apply_overrides;
use nvcool_core::response::{
    alpha_impulse_integral, correlation_and_diffusion, friction_analytic, friction_numeric_oracle,
    linear_response_friction, steady_energy_gradient, torque_expectation, OracleOptions,
};
use nvcool_core::rotor::{langevin_ensemble, EnsembleOptions, LangevinModel};
use nvcool_core::spin::{
    bloch_generator, build_hamiltonian, evolve_master, evolve_to_steady, steady_state_analytic,
    MasterOptions, Rates, SpinState,
};
use nvcool_core::{ode::Tolerances, SystemConfig};

use crate::error::{CliError, CliResult};
use crate::output::{json_num, Cell, Column, OutputDir, Table};
use crate::{Cli, Loaded};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// "angular", "cyclic", or "none" for convention-free checks.
    pub convention: String,
    /// Worst discrepancy over the check's points.
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: Value,
}

impl Check {
    fn new(name: &str, convention: &str, measured: f64, tolerance: f64, detail: Value) -> Self {
        Check {
            name: name.into(),
            convention: convention.into(),
            measured,
            tolerance,
            pass: measured <= tolerance,
            detail,
        }
    }

    fn errored(name: &str, convention: &str, tolerance: f64, err: impl std::fmt::Display) -> Self {
        Check {
            name: name.into(),
            convention: convention.into(),
            measured: f64::INFINITY,
            tolerance,
            pass: false,
            detail: json!({ "error": err.to_string() }),
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

const ALPHAS: [f64; 4] = [0.0, PI / 4.0, PI / 2.0, PI];

fn steady_vs_evolution(cfg: &SystemConfig, conv: &str) -> Check {
    let rates = Rates::from_config(cfg);
    let opts = MasterOptions {
        tol: Tolerances::default().with_rtol(1e-11).with_atol(1e-15),
        ..MasterOptions::default()
    };
    let mut worst: f64 = 0.0;
    for a in ALPHAS {
        for bd in [0.0f64, 2.0, 4.0, 8.0] {
            let h = build_hamiltonian(cfg, a, bd.to_radians(), 0.0);
            let analytic = steady_state_analytic(&h, &rates).to_state();
            match evolve_to_steady(&SpinState::ground(), &h, rates, 1e-11, &opts) {
                Ok((s, _)) => {
                    let d = (analytic.rho - s.rho)
                        .iter()
                        .map(|z| z.norm())
                        .fold(0.0, f64::max);
                    worst = worst.max(d);
                }
                Err(e) => return Check::errored("steady_state_vs_evolution", conv, 1e-8, e),
            }
        }
    }
    Check::new(
        "steady_state_vs_evolution",
        conv,
        worst,
        1e-8,
        json!({ "points": 16 }),
    )
}

fn steady_vs_null_space(cfg: &SystemConfig, conv: &str) -> Check {
    let rates = Rates::from_config(cfg);
    let mut worst: f64 = 0.0;
    for a in ALPHAS {
        for bd in [0.0f64, 2.0, 4.0, 8.0] {
            let h = build_hamiltonian(cfg, a, bd.to_radians(), 0.0);
            let y = steady_state_analytic(&h, &rates).to_state().to_bloch();
            let (m, b) = bloch_generator(&h, &rates);
            let Some(x) = m.lu().solve(&(-b)) else {
                return Check::errored(
                    "steady_state_vs_null_space",
                    conv,
                    1e-12,
                    "singular generator",
                );
            };
            for i in 0..3 {
                worst = worst.max((x[i] - y[i]).abs());
            }
        }
    }
    Check::new(
        "steady_state_vs_null_space",
        conv,
        worst,
        1e-12,
        json!({ "points": 16 }),
    )
}

/// κ_β from the finite-velocity master-equation extraction against the
/// closed form (the gate) and the exact linear response (oracle sanity).
fn kappa_checks(cfg: &SystemConfig, conv: &str) -> Vec<Check> {
    let opts = OracleOptions::default();
    let mut points = Vec::new();
    let (mut worst_an, mut worst_lr): (f64, f64) = (0.0, 0.0);
    let mut skipped = 0;
    for a in ALPHAS {
        for bd in 1..=8 {
            let b = f64::from(bd).to_radians();
            let rate = OracleOptions::auto_rate(cfg, a, b);
            let o = match friction_numeric_oracle(cfg, a, b, 0.0, rate, &opts) {
                Ok(o) => o,
                Err(e) => {
                    let c = Check::errored("kappa_beta_oracle_vs_analytic", conv, 0.02, e);
                    return vec![c];
                }
            };
            if !o.resolved_beta {
                skipped += 1;
                continue;
            }
            let an = friction_analytic(cfg, a, b)
                .map(|r| r.kappa_beta)
                .unwrap_or(f64::NAN);
            let lr = linear_response_friction(cfg, a, b)
                .map(|r| r.kappa_beta)
                .unwrap_or(f64::NAN);
            let (da, dl) = (rel(an, o.kappa_beta), rel(lr, o.kappa_beta));
            worst_an = worst_an.max(if da.is_nan() { f64::INFINITY } else { da });
            worst_lr = worst_lr.max(if dl.is_nan() { f64::INFINITY } else { dl });
            points.push(json!({
                "alpha_rad": a,
                "beta_rad": b,
                "oracle_J_s": json_num(o.kappa_beta),
                "analytic_J_s": json_num(an),
                "linear_response_J_s": json_num(lr),
                "analytic_rel_diff": json_num(da),
            }));
        }
    }
    vec![
        Check::new(
            "kappa_beta_oracle_vs_analytic",
            conv,
            worst_an,
            0.02,
            json!({ "unresolved_points_skipped": skipped, "points": points }),
        ),
        Check::new(
            "kappa_beta_oracle_vs_linear_response",
            conv,
            worst_lr,
            1e-3,
            json!({ "unresolved_points_skipped": skipped }),
        ),
    ]
}

fn kappa_alphabeta_oracle(cfg: &SystemConfig, conv: &str) -> Check {
    let (a, b) = (1.0, 4f64.to_radians());
    let rate = OracleOptions::auto_rate(cfg, a, b);
    let o = match friction_numeric_oracle(cfg, a, b, rate, 0.0, &OracleOptions::default()) {
        Ok(o) => o,
        Err(e) => {
            return Check::errored("kappa_alphabeta_oracle_vs_linear_response", conv, 1e-3, e)
        }
    };
    match linear_response_friction(cfg, a, b) {
        Ok(lr) => Check::new(
            "kappa_alphabeta_oracle_vs_linear_response",
            conv,
            rel(lr.kappa_alphabeta, o.kappa_alphabeta),
            1e-3,
            json!({ "alpha_rad": a, "beta_rad": b, "oracle_J_s": o.kappa_alphabeta, "linear_response_J_s": lr.kappa_alphabeta }),
        ),
        Err(e) => Check::errored("kappa_alphabeta_oracle_vs_linear_response", conv, 1e-3, e),
    }
}

fn torque_gradient(cfg: &SystemConfig, conv: &str) -> Check {
    let (a, b) = (0.0, 2f64.to_radians());
    let h = build_hamiltonian(cfg, a, b, 0.0);
    let s = steady_state_analytic(&h, &Rates::from_config(cfg)).to_state();
    let (_, m) = torque_expectation(&h, &s, cfg);
    let fd = steady_energy_gradient(cfg, a, b, &s, 1e-5);
    Check::new(
        "torque_vs_energy_gradient",
        conv,
        rel(fd, m),
        1e-6,
        json!({ "torque_N_m": m, "finite_difference_N_m": fd }),
    )
}

fn diffusion_checks(cfg: &SystemConfig, conv: &str) -> Vec<Check> {
    let (mut worst_q, mut worst_r): (f64, f64) = (0.0, 0.0);
    for bd in [2.0f64, 4.0] {
        match correlation_and_diffusion(cfg, 0.0, bd.to_radians()) {
            Ok(c) => {
                worst_q = worst_q.max(rel(c.d_p_quadrature, c.d_p));
                worst_r = worst_r.max(rel(c.d_p_regression, c.d_p));
            }
            Err(e) => return vec![Check::errored("diffusion_vs_quadrature", conv, 1e-6, e)],
        }
    }
    vec![
        Check::new("diffusion_vs_quadrature", conv, worst_q, 1e-6, json!({})),
        Check::new(
            "diffusion_vs_regression_theorem",
            conv,
            worst_r,
            0.1,
            json!({}),
        ),
    ]
}

fn saturation_identity(cfg: &SystemConfig, conv: &str) -> Check {
    let mut worst: f64 = 0.0;
    for a in ALPHAS {
        for bd in 0..=12 {
            if let Ok(r) = friction_analytic(cfg, a, f64::from(bd).to_radians()) {
                let lhs = (2.0 + r.f0).powi(2) * r.g0;
                worst = worst.max(rel(lhs, 1.0 + r.f0));
            }
        }
    }
    Check::new("saturation_identity", conv, worst, 1e-13, json!({}))
}

fn zero_impulse(cfg: &SystemConfig, conv: &str) -> Check {
    let mut worst: f64 = 0.0;
    for bd in [2.0f64, 4.0, 8.0] {
        match alpha_impulse_integral(cfg, bd.to_radians()) {
            Ok(c) => worst = worst.max(c.relative()),
            Err(e) => return Check::errored("zero_alpha_impulse", conv, 1e-8, e),
        }
    }
    Check::new("zero_alpha_impulse", conv, worst, 1e-8, json!({}))
}

fn nv_scaling(cfg: &SystemConfig, conv: &str) -> Check {
    let b = 2f64.to_radians();
    let mut c4 = cfg.clone();
    c4.nv_count = 4 * cfg.nv_count;
    match (
        friction_analytic(cfg, 0.0, b),
        friction_analytic(&c4, 0.0, b),
    ) {
        (Ok(r1), Ok(r4)) => {
            let d = rel(r4.kappa_beta, 4.0 * r1.kappa_beta)
                .max(rel(r4.d_p, 4.0 * r1.d_p))
                .max(rel(r4.t_f.unwrap_or(f64::NAN), r1.t_f.unwrap_or(f64::NAN)));
            Check::new(
                "nv_count_scaling",
                conv,
                if d.is_nan() { f64::INFINITY } else { d },
                1e-12,
                json!({}),
            )
        }
        (Err(e), _) | (_, Err(e)) => Check::errored("nv_count_scaling", conv, 1e-12, e),
    }
}

fn temperature_minimum(cfg: &SystemConfig, conv: &str) -> Check {
    let mut weak = cfg.clone();
    weak.zeeman_b1 = 2e4;
    let g1 = weak.dephase_rate;
    let tf = |d: f64| {
        friction_analytic(&weak.clone().with_rest_detuning(d), 0.0, 0.0)
            .ok()
            .and_then(|r| r.t_f_closed_form.map(|t| (t, r.f0)))
    };
    let (Some((t0, f0)), Some((tlo, _)), Some((thi, _))) = (tf(g1), tf(0.9 * g1), tf(1.1 * g1))
    else {
        return Check::errored("temperature_minimum", conv, 1e-3, "no damping at δ₊ = Γ₁");
    };
    let target = 2.0 * HBAR * g1 / K_B;
    let d = rel(t0, target);
    let is_min = tlo > t0 && thi > t0;
    Check::new(
        "temperature_minimum",
        conv,
        if is_min { d } else { f64::INFINITY },
        1e-3,
        json!({ "t_f_K": t0, "two_hbar_gamma1_over_kB_K": target, "f0": f0, "is_local_minimum": is_min }),
    )
}

fn three_level_leakage(cfg: &SystemConfig, conv: &str) -> Check {
    let rates = Rates::from_config(cfg);
    let h = build_hamiltonian(cfg, 0.0, 0.05, 0.0);
    let samples: Vec<f64> = [5.0, 20.0, 40.0].iter().map(|k| k / rates.pump).collect();
    match evolve_master(
        &SpinState::ground(),
        |_| h,
        rates,
        0.0,
        &samples,
        &MasterOptions::three_level(),
    ) {
        Ok(tr) => {
            let worst = tr
                .states
                .iter()
                .map(|s| s.population_minus())
                .fold(0.0, f64::max);
            Check::new("three_level_minus_population", conv, worst, 1e-3, json!({}))
        }
        Err(e) => Check::errored("three_level_minus_population", conv, 1e-3, e),
    }
}

/// All per-convention checks for one resolved config.
pub fn convention_checks(cfg: &SystemConfig, conv: &str) -> Vec<Check> {
    let mut out = vec![
        steady_vs_evolution(cfg, conv),
        steady_vs_null_space(cfg, conv),
    ];
    out.extend(kappa_checks(cfg, conv));
    out.push(kappa_alphabeta_oracle(cfg, conv));
    out.push(torque_gradient(cfg, conv));
    out.extend(diffusion_checks(cfg, conv));
    out.push(saturation_identity(cfg, conv));
    out.push(zero_impulse(cfg, conv));
    out.push(nv_scaling(cfg, conv));
    out.push(temperature_minimum(cfg, conv));
    out.push(three_level_leakage(cfg, conv));
    out
}

/// Langevin integrator against the Ornstein-Uhlenbeck equipartition result.
pub fn ornstein_uhlenbeck_check(seed: u64) -> Check {
    let inertia = 1e-34;
    let kappa = 2e3 * inertia;
    let target = 1e-4;
    let model = LangevinModel {
        inertia,
        stiffness: 1e10 * inertia,
        kappa,
        d_p: target * K_B * kappa,
        beta_eq: 0.0,
    };
    match langevin_ensemble(&model, &EnsembleOptions::for_model(&model, 200, seed)) {
        Ok(r) => Check::new(
            "langevin_ornstein_uhlenbeck",
            "none",
            rel(r.effective_temperature, target),
            0.05,
            json!({ "effective_temperature_K": r.effective_temperature, "stderr_K": r.effective_temperature_stderr }),
        ),
        Err(e) => Check::errored("langevin_ornstein_uhlenbeck", "none", 0.05, e),
    }
}

pub fn run(cli: &Cli, loaded: &Loaded, out: &mut OutputDir) -> CliResult<()> {
    let mut checks = Vec::new();
    let mut fingerprints = serde_json::Map::new();
    for (label, flag) in [("angular", "true"), ("cyclic", "false")] {
        let mut doc = loaded.doc.clone();
        apply_overrides(&mut doc, &[("rates_are_angular".into(), flag.into())])?;
        let cfg = SystemConfig::from_json_value(&doc)?;
        fingerprints.insert(label.into(), json!(cfg.fingerprint()));
        checks.extend(convention_checks(&cfg, label));
    }
    checks.push(ornstein_uhlenbeck_check(cli.seed));

    let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
    let report = json!({
        "all_passed": failed.is_empty(),
        "failed": failed.iter().map(|c| format!("{} ({})", c.name, c.convention)).collect::<Vec<_>>(),
        "convention_fingerprints": fingerprints,
        "checks": checks,
    });
    out.write_json("validate_oracles.json", report)?;
    let mut t = Table::new(vec![
        Column::plain("check"),
        Column::plain("convention"),
        Column::plain("measured"),
        Column::plain("tolerance"),
        Column::plain("pass"),
    ]);
    for c in &checks {
        t.push(vec![
            c.name.as_str().into(),
            c.convention.as_str().into(),
            Cell::Num(c.measured),
            c.tolerance.into(),
            c.pass.into(),
        ]);
    }
    out.write_table("validate_oracles_summary", &t, cli.format, json!({}))?;
    for c in &checks {
        println!(
            "{} {} [{}] measured {:.3e} tol {:.1e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.convention,
            c.measured,
            c.tolerance
        );
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Physics(format!(
            "{} of {} oracle checks failed",
            failed.len(),
            checks.len()
        )))
    }
}
