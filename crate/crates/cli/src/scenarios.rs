use std::f64::consts::{FRAC_PI_4, PI};
use std::io::Write;

use serde_json::{json, Value};

use nvcool_core::consts::{HBAR, K_B, PLANCK_H};
use nvcool_core::params::apply_overrides;
use nvcool_core::response::{fig4_rows, friction_analytic, ResponseCoefficients};
use nvcool_core::rotor::{
    equilibrium_beta, integrate_deterministic, langevin_ensemble, AnalyticField, ConstantField,
    DeterministicOptions, EnsembleOptions, FrictionField, LangevinModel, LinearResponseField,
    Potential, RotorState,
};
use nvcool_core::spin::build_hamiltonian;
use nvcool_core::{derive_trap, SystemConfig, TrapModel};

use crate::compare::compare_files;
use crate::error::{CliError, CliResult};
use crate::output::{json_num, Cell, Column, OutputDir, Table};
use crate::{
    load_config, parse_overrides, validate, Cli, FieldKind, Loaded, PotentialKind, SCENARIOS,
};

pub fn dispatch(cli: &Cli, command: Vec<String>) -> CliResult<()> {
    let name = cli.scenario.as_str();
    if !SCENARIOS.contains(&name) {
        return Err(CliError::Usage(format!(
            "unknown scenario `{name}`; expected one of: {}",
            SCENARIOS.join(", ")
        )));
    }
    if name == "compare" {
        return compare(cli);
    }
    if !cli.files.is_empty() {
        return Err(CliError::Usage(format!(
            "`{name}` takes no positional files"
        )));
    }
    let config = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("`{name}` needs --config <file>")))?;
    let loaded = load_config(config, &parse_overrides(&cli.set)?)?;
    if name == "validate" {
        let trap = derive_trap(&loaded.cfg)?;
        print_json(&trap_json(&loaded.cfg, &trap));
        return Ok(());
    }
    let sweep_values = if name == "sweep" {
        Some(sweep_inputs(cli)?)
    } else {
        None
    };
    let mut out = OutputDir::open(&cli.out, &loaded.cfg.fingerprint(), command)?;
    match name {
        "trap" => trap(&loaded.cfg, &mut out),
        "fig3" => fig3(cli, &loaded.cfg, &mut out),
        "fig4" => fig4(cli, &loaded.cfg, &mut out),
        "cool" => cool(cli, &loaded.cfg, &mut out),
        "ensemble" => ensemble(cli, &loaded.cfg, &mut out),
        "validate-oracles" => validate::run(cli, &loaded, &mut out),
        "sweep" => {
            let (param, values) = sweep_values.expect("checked above");
            sweep(cli, &loaded, &param, &values, &mut out)
        }
        _ => unreachable!("registered scenario without a handler"),
    }
}

fn compare(cli: &Cli) -> CliResult<()> {
    let [a, b] = cli.files.as_slice() else {
        return Err(CliError::Usage("compare needs exactly two files".into()));
    };
    let c = compare_files(a, b, cli.rtol)?;
    print_json(&serde_json::to_value(&c).expect("plain JSON"));
    if c.matches() {
        Ok(())
    } else {
        Err(CliError::Physics(format!(
            "{} of {} values differ beyond rtol {}",
            c.mismatches, c.values_compared, cli.rtol
        )))
    }
}

/// Stdout is informational; a closed pipe is not an error.
fn print_json(v: &Value) {
    let _ = writeln!(
        std::io::stdout(),
        "{}",
        serde_json::to_string_pretty(v).expect("plain JSON")
    );
}

pub fn trap_json(cfg: &SystemConfig, trap: &TrapModel) -> Value {
    json!({
        "trap_depth_J": trap.trap_depth,
        "depth_temperature_K": trap.depth_temperature(),
        "beta_m_rad": trap.confinement.beta_m(),
        "trap_stiffness_k_J_per_rad2": trap.trap_stiffness_k,
        "inertia_i1_kg_m2": trap.inertia_i1,
        "inertia_i3_kg_m2": trap.inertia_i3,
        "libration_freq_omega0_rad_per_s": trap.libration_freq_omega0,
        "quantum_threshold_K": HBAR * trap.libration_freq_omega0 / K_B,
        "polarizability_x_C_m2_per_V": trap.polarizability_x,
        "polarizability_z_C_m2_per_V": trap.polarizability_z,
        "field_sq_e2_V2_per_m2": trap.field_sq_e2,
        "no_cooling": trap.no_cooling,
        "config": cfg.resolved_json(),
    })
}

fn trap(cfg: &SystemConfig, out: &mut OutputDir) -> CliResult<()> {
    let trap = derive_trap(cfg)?;
    out.write_json("trap.json", trap_json(cfg, &trap))?;
    Ok(())
}

fn delta_plus(cfg: &SystemConfig, alpha: f64, beta: f64) -> f64 {
    build_hamiltonian(cfg, alpha, beta, 0.0).delta_plus
}

/// First sign change of δ₊(α=0, β) on (0, π/4], refined by bisection.
pub fn alpha0_crossing(cfg: &SystemConfig) -> Option<f64> {
    let f = |b: f64| delta_plus(cfg, 0.0, b);
    let n = 900;
    let grid: Vec<f64> = (0..=n).map(|i| FRAC_PI_4 * i as f64 / n as f64).collect();
    let (mut lo, mut hi) = grid
        .windows(2)
        .map(|w| (w[0], w[1]))
        .find(|&(a, b)| f(a) * f(b) <= 0.0)?;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn fig3(cli: &Cli, cfg: &SystemConfig, out: &mut OutputDir) -> CliResult<()> {
    let mut t = Table::new(vec![
        Column::angle("beta"),
        Column::plain("delta_plus_alpha0_rad_per_s"),
        Column::plain("delta_plus_alphapi_rad_per_s"),
    ]);
    for i in 0..=240 {
        let b = (0.05 * i as f64).to_radians();
        t.push(vec![
            b.into(),
            delta_plus(cfg, 0.0, b).into(),
            delta_plus(cfg, PI, b).into(),
        ]);
    }
    let summary = json!({
        "crossing_beta0_rad": alpha0_crossing(cfg),
        "configured_beta0_rad": cfg.crossing_angle(),
    });
    out.write_table("fig3", &t, cli.format, summary.clone())?;
    out.write_json("fig3_summary.json", summary)?;
    Ok(())
}

pub fn response_columns() -> Vec<Column> {
    vec![
        Column::angle("alpha"),
        Column::angle("beta"),
        Column::plain("delta_plus_rad_per_s"),
        Column::plain("f0"),
        Column::plain("p_s"),
        Column::plain("kappa_beta_h"),
        Column::plain("kappa_alphabeta_h"),
        Column::plain("M_beta_0_N_m"),
        Column::plain("D_p_J2s"),
        Column::plain("T_f_K"),
        Column::plain("T_f_closed_form_K"),
        Column::plain("T_f_large_f0_K"),
        Column::plain("nv_count_n"),
        Column::plain("region_tag"),
    ]
}

pub fn response_cells(r: &ResponseCoefficients) -> Vec<Cell> {
    vec![
        r.alpha.into(),
        r.beta.into(),
        r.delta_plus.into(),
        r.f0.into(),
        r.p_s.into(),
        r.kappa_beta_h().into(),
        r.kappa_alphabeta_h().into(),
        r.m_beta_0.into(),
        r.d_p.into(),
        r.t_f.into(),
        r.t_f_closed_form.into(),
        r.t_f_large_f0.into(),
        r.nv_count.into(),
        r.region.tag().into(),
    ]
}

fn fig4(cli: &Cli, cfg: &SystemConfig, out: &mut OutputDir) -> CliResult<()> {
    let betas: Vec<f64> = (0..=80).map(|i| (0.1 * i as f64).to_radians()).collect();
    let rows = fig4_rows(cfg, &[0.0, PI], &betas)?;
    let mut t = Table::new(response_columns());
    for r in &rows {
        t.push(response_cells(r));
    }
    out.write_table("fig4", &t, cli.format, json!({}))?;
    Ok(())
}

fn cool(cli: &Cli, cfg: &SystemConfig, out: &mut OutputDir) -> CliResult<()> {
    let trap = derive_trap(cfg)?;
    let alpha = cli.alpha_deg.to_radians();
    let (field, label): (Box<dyn FrictionField>, String) = match (cli.kappa_h, cli.field) {
        (Some(k), _) => (
            Box::new(ConstantField::kappa_only(k * PLANCK_H)),
            format!("constant {k} h"),
        ),
        (None, FieldKind::Analytic) => (Box::new(AnalyticField::new(cfg)), "analytic".into()),
        (None, FieldKind::LinearResponse) => (
            Box::new(LinearResponseField::at_frequency(
                cfg,
                trap.libration_freq_omega0,
            )),
            "linear_response_at_omega0".into(),
        ),
    };
    let potential = match cli.potential {
        PotentialKind::Harmonic => Potential::Harmonic,
        PotentialKind::Full => Potential::Full,
    };
    let beq = equilibrium_beta(&trap, field.as_ref(), alpha, potential)?;
    let kappa_eq = field.at(alpha, beq).kappa_beta;
    if kappa_eq == 0.0 {
        return Err(CliError::Physics(
            "no friction at the equilibrium orientation".into(),
        ));
    }
    let tau = trap.inertia_i1 / kappa_eq;
    let t_end = cli.duration * tau.abs();
    let s0 = RotorState::at_rest(alpha, beq + cli.displacement_deg.to_radians());
    let opts = DeterministicOptions {
        potential,
        samples: cli.samples.max(2),
        ..DeterministicOptions::default()
    };
    let tr = integrate_deterministic(&trap, field.as_ref(), s0, (0.0, t_end), &opts)?;

    let mut t = Table::new(vec![
        Column::plain("t_s"),
        Column::angle("alpha"),
        Column::angle("beta"),
        Column::plain("beta_dot_rad_per_s"),
        Column::plain("energy_J"),
        Column::plain("kappa_beta_h"),
    ]);
    for i in 0..tr.times.len() {
        let s = &tr.states[i];
        t.push(vec![
            tr.times[i].into(),
            s.alpha.into(),
            s.beta.into(),
            s.beta_dot.into(),
            tr.energy[i].into(),
            (tr.kappa_beta[i] / PLANCK_H).into(),
        ]);
    }
    out.write_table("cool_trajectory", &t, cli.format, json!({}))?;
    let kp = tr.kappa_power_mean();
    let report = json!({
        "field": label,
        "potential": format!("{:?}", cli.potential).to_lowercase(),
        "alpha_rad": alpha,
        "beta_eq_rad": beq,
        "displacement_rad": cli.displacement_deg.to_radians(),
        "duration_s": t_end,
        "kappa_beta_at_equilibrium_h": json_num(kappa_eq / PLANCK_H),
        "kappa_beta_power_mean_h": json_num(kp / PLANCK_H),
        "kappa_beta_time_mean_h": json_num(tr.kappa_time_mean() / PLANCK_H),
        "damping_time_predicted_s": json_num(tau),
        "damping_time_power_mean_s": json_num(trap.inertia_i1 / kp),
        "damping_time_fit_s": tr.damping_time_fit().map(json_num),
        "energy_rate_per_s": tr.energy_rate().map(json_num),
        "initial_energy_J": json_num(tr.energy[0]),
        "final_energy_J": json_num(*tr.energy.last().expect("at least two samples")),
        "untrapped": tr.untrapped,
    });
    out.write_json("cool_report.json", report)?;
    Ok(())
}

fn ensemble(cli: &Cli, cfg: &SystemConfig, out: &mut OutputDir) -> CliResult<()> {
    let trap = derive_trap(cfg)?;
    let alpha = cli.alpha_deg.to_radians();
    let model = LangevinModel::from_field(&trap, &AnalyticField::new(cfg), alpha)?;
    if model.kappa.is_nan() || model.kappa <= 0.0 {
        return Err(CliError::Physics(format!(
            "spin friction at equilibrium is {} h; no cooling steady state",
            model.kappa / PLANCK_H
        )));
    }
    let rate = model.damping_rate();
    let mut opts = EnsembleOptions::for_model(&model, cli.n_traj, cli.seed);
    opts.dt = cli.dt_factor / model.omega0().max(rate);
    opts.burn_in = cli.burn_in / rate;
    opts.window = cli.window / rate;
    let report = langevin_ensemble(&model, &opts)?;
    let doc = json!({
        "alpha_rad": alpha,
        "field": "analytic",
        "model": model,
        "report": report,
    });
    out.write_json("ensemble_report.json", doc)?;
    Ok(())
}

fn sweep_inputs(cli: &Cli) -> CliResult<(String, Vec<String>)> {
    let param = cli
        .param
        .clone()
        .ok_or_else(|| CliError::Usage("sweep needs --param <config key>".into()))?;
    if param == "rates_are_angular" {
        return Err(CliError::Usage("sweep parameter must be numeric".into()));
    }
    let values: Vec<String> = cli
        .values
        .as_deref()
        .unwrap_or("")
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(str::to_string)
        .collect();
    if values.is_empty() {
        return Err(CliError::Usage(
            "sweep needs a non-empty --values list".into(),
        ));
    }
    Ok((param, values))
}

fn sweep_point(
    base: &Value,
    param: &str,
    value: &str,
    alpha: f64,
    beta: f64,
) -> CliResult<(SystemConfig, ResponseCoefficients)> {
    let mut doc = base.clone();
    apply_overrides(&mut doc, &[(param.to_string(), value.to_string())])?;
    let cfg = SystemConfig::from_json_value(&doc)?;
    let r = friction_analytic(&cfg, alpha, beta)?;
    Ok((cfg, r))
}

fn sweep(
    cli: &Cli,
    loaded: &Loaded,
    param: &str,
    values: &[String],
    out: &mut OutputDir,
) -> CliResult<()> {
    let (alpha, beta) = (cli.alpha_deg.to_radians(), cli.beta_deg.to_radians());
    let mut cols = vec![
        Column::plain("index"),
        Column::plain("value"),
        Column::plain("config_fingerprint"),
    ];
    cols.extend(response_columns());
    let mut t = Table::new(cols);
    let mut failure = None;
    for (i, v) in values.iter().enumerate() {
        match sweep_point(&loaded.doc, param, v, alpha, beta) {
            Ok((cfg, r)) => {
                let mut row = vec![
                    Cell::Int(i as i64),
                    v.as_str().into(),
                    cfg.fingerprint().into(),
                ];
                row.extend(response_cells(&r));
                t.push(row);
            }
            Err(e) => {
                failure = Some((i, e));
                break;
            }
        }
    }
    let completed: Vec<usize> = (0..t.rows.len()).collect();
    let index = json!({
        "param": param,
        "values": values,
        "alpha_rad": alpha,
        "beta_rad": beta,
        "completed": completed,
        "failed_index": failure.as_ref().map(|(i, _)| *i),
        "error": failure.as_ref().map(|(_, e)| e.to_string()),
    });
    out.write_table("sweep", &t, cli.format, json!({ "param": param }))?;
    out.write_json("sweep.index.json", index)?;
    match failure {
        Some((i, e)) => {
            eprintln!(
                "sweep stopped at point {i} ({}); {} points kept",
                values[i],
                t.rows.len()
            );
            Err(e)
        }
        None => Ok(()),
    }
}
