//! Physical parameters, the unit-tagged config file, and the derived optical
//! trap (polarizabilities, depth, stiffness, inertia, libration frequency).

use std::f64::consts::{FRAC_PI_4, PI};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::consts::{EPSILON_0, K_B, SPEED_OF_LIGHT, TWO_PI};
use crate::error::{Error, Result};
use crate::units::{parse_quantity, parse_tagged_literal, Dimension, RateConvention};

/// How the microwave frequency ω is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MicrowaveDrive {
    /// ω chosen so that δ₊(α=0, β₀) = 0.
    CrossingAngle(f64),
    /// ω given explicitly (rad/s).
    Frequency(f64),
    /// ω chosen so that δ₊ at β=0 equals the given detuning (rad/s).
    RestDetuning(f64),
}

/// All physical inputs. Lengths in m, frequencies and rates in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemConfig {
    pub semi_major_a: f64,
    pub semi_minor_b: f64,
    pub mass_density: f64,
    pub dielectric_const: f64,
    pub laser_power: f64,
    /// πw² at the waist.
    pub beam_area: f64,
    pub zero_field_splitting: f64,
    pub microwave: MicrowaveDrive,
    /// γB₀.
    pub zeeman_b0: f64,
    /// γB₁.
    pub zeeman_b1: f64,
    /// Γ, population pumping rate of |+1⟩.
    pub pump_rate: f64,
    /// Γ₁, decay rate of the 0/+1 coherence.
    pub dephase_rate: f64,
    pub nv_count: u32,
    pub bath_temperature: f64,
    pub rate_convention: RateConvention,
}

const KEYS: &[&str] = &[
    "semi_major_a",
    "semi_minor_b",
    "mass_density",
    "dielectric_const",
    "laser_power",
    "beam_area",
    "zero_field_splitting_D",
    "microwave_freq_omega",
    "crossing_angle_beta0",
    "delta_plus_at_rest",
    "zeeman_B0",
    "zeeman_B1",
    "pump_rate_Gamma",
    "dephase_rate_Gamma1",
    "nv_count_n",
    "bath_temperature_T",
    "rates_are_angular",
];

impl SystemConfig {
    /// The nanodiamond setup used for the reference figures: a 40×20 nm
    /// spheroid in a 100 mW tweezer, γB₀ = 2π×100 MHz, γB₁ = 2π×1 MHz,
    /// Γ = 0.4, Γ₁ = 5 (MHz, read per `conv`), β₀ = 9°.
    pub fn paper(conv: RateConvention) -> Self {
        let rate = |x: f64| match conv {
            RateConvention::Angular => x * 1e6,
            RateConvention::Cyclic => x * 1e6 * TWO_PI,
        };
        SystemConfig {
            semi_major_a: 40e-9,
            semi_minor_b: 20e-9,
            mass_density: 3500.0,
            dielectric_const: 5.7,
            laser_power: 0.1,
            beam_area: 2e-12,
            zero_field_splitting: TWO_PI * 2.87e9,
            microwave: MicrowaveDrive::CrossingAngle(9f64.to_radians()),
            zeeman_b0: TWO_PI * 100e6,
            zeeman_b1: TWO_PI * 1e6,
            pump_rate: rate(0.4),
            dephase_rate: rate(5.0),
            nv_count: 1,
            bath_temperature: 5.0,
            rate_convention: conv,
        }
    }

    /// D − ω, the detuning common to both |±1⟩ levels.
    pub fn detuning_offset(&self) -> f64 {
        match self.microwave {
            MicrowaveDrive::CrossingAngle(beta0) => self.zeeman_b0 * (FRAC_PI_4 - beta0).cos(),
            MicrowaveDrive::Frequency(omega) => self.zero_field_splitting - omega,
            MicrowaveDrive::RestDetuning(d) => d + self.zeeman_b0 * FRAC_PI_4.cos(),
        }
    }

    pub fn microwave_freq(&self) -> f64 {
        match self.microwave {
            MicrowaveDrive::Frequency(omega) => omega,
            _ => self.zero_field_splitting - self.detuning_offset(),
        }
    }

    /// β₀ at which δ₊(α=0) crosses zero, if it lies in [0, π/4].
    pub fn crossing_angle(&self) -> Option<f64> {
        if let MicrowaveDrive::CrossingAngle(b) = self.microwave {
            return Some(b);
        }
        if self.zeeman_b0 <= 0.0 {
            return None;
        }
        let c = self.detuning_offset() / self.zeeman_b0;
        if !(FRAC_PI_4.cos()..=1.0).contains(&c) {
            return None;
        }
        Some(FRAC_PI_4 - c.acos())
    }

    /// Same setup with ω re-chosen so that δ₊(β=0) equals `delta`.
    pub fn with_rest_detuning(mut self, delta: f64) -> Self {
        self.microwave = MicrowaveDrive::RestDetuning(delta);
        self
    }

    /// No anisotropy or no static/drive field: nothing to cool with.
    pub fn is_no_cooling(&self) -> bool {
        self.semi_major_a == self.semi_minor_b || self.zeeman_b0 == 0.0 || self.zeeman_b1 == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.semi_minor_b > 0.0) {
            return bad("semi_minor_b must be > 0");
        }
        if self.semi_major_a < self.semi_minor_b {
            return Err(Error::Oblate {
                a: self.semi_major_a,
                b: self.semi_minor_b,
            });
        }
        if !(self.dielectric_const > 1.0) {
            return bad("dielectric_const must be > 1");
        }
        if !(self.mass_density > 0.0) {
            return bad("mass_density must be > 0");
        }
        if !(self.laser_power > 0.0) {
            return bad("laser_power must be > 0");
        }
        if !(self.beam_area > 0.0) {
            return bad("beam_area must be > 0");
        }
        for (name, v) in [
            ("zeeman_B0", self.zeeman_b0),
            ("zeeman_B1", self.zeeman_b1),
            ("pump_rate_Gamma", self.pump_rate),
            ("dephase_rate_Gamma1", self.dephase_rate),
            ("zero_field_splitting_D", self.zero_field_splitting),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and >= 0"
                )));
            }
        }
        if let MicrowaveDrive::CrossingAngle(b) = self.microwave {
            if !(b > 0.0 && b < FRAC_PI_4) {
                return bad("crossing_angle_beta0 must lie in (0, 45°)");
            }
        }
        if self.nv_count == 0 {
            return bad("nv_count_n must be a positive integer");
        }
        if !(self.bath_temperature >= 0.0) {
            return bad("bath_temperature_T must be >= 0");
        }
        Ok(())
    }

    /// Parses and validates a config JSON document.
    pub fn from_json_value(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidConfig("config must be a JSON object".into()))?;
        for k in obj.keys() {
            if !KEYS.contains(&k.as_str()) {
                return Err(Error::InvalidConfig(format!("unknown config key `{k}`")));
            }
        }
        let conv = match obj.get("rates_are_angular") {
            None => RateConvention::Angular,
            Some(Value::Bool(b)) => RateConvention::from_flag(*b),
            Some(_) => {
                return Err(Error::InvalidConfig(
                    "rates_are_angular must be a boolean".into(),
                ))
            }
        };
        let q = |key: &str, dim: Dimension| -> Result<f64> {
            let v = obj
                .get(key)
                .ok_or_else(|| Error::MissingKey(key.to_string()))?;
            parse_quantity(key, v, dim, conv)
        };
        let opt = |key: &str, dim: Dimension| -> Result<Option<f64>> {
            obj.get(key)
                .map(|v| parse_quantity(key, v, dim, conv))
                .transpose()
        };
        let dielectric_const = obj
            .get("dielectric_const")
            .ok_or_else(|| Error::MissingKey("dielectric_const".into()))?
            .as_f64()
            .ok_or_else(|| {
                Error::InvalidConfig("dielectric_const must be a plain number".into())
            })?;
        let nv_count = match obj.get("nv_count_n") {
            None => 1,
            Some(v) => v
                .as_u64()
                .filter(|&n| n >= 1 && n <= u32::MAX as u64)
                .ok_or_else(|| {
                    Error::InvalidConfig("nv_count_n must be a positive integer".into())
                })? as u32,
        };
        // Explicit ω wins over a rest detuning, which wins over β₀.
        let microwave = if let Some(w) = opt("microwave_freq_omega", Dimension::Frequency)? {
            MicrowaveDrive::Frequency(w)
        } else if let Some(d) = opt("delta_plus_at_rest", Dimension::Frequency)? {
            MicrowaveDrive::RestDetuning(d)
        } else if let Some(b) = opt("crossing_angle_beta0", Dimension::Angle)? {
            MicrowaveDrive::CrossingAngle(b)
        } else {
            return Err(Error::MissingKey(
                "one of microwave_freq_omega, crossing_angle_beta0, delta_plus_at_rest".into(),
            ));
        };
        let cfg = SystemConfig {
            semi_major_a: q("semi_major_a", Dimension::Length)?,
            semi_minor_b: q("semi_minor_b", Dimension::Length)?,
            mass_density: q("mass_density", Dimension::Density)?,
            dielectric_const,
            laser_power: q("laser_power", Dimension::Power)?,
            beam_area: q("beam_area", Dimension::Area)?,
            zero_field_splitting: q("zero_field_splitting_D", Dimension::Frequency)?,
            microwave,
            zeeman_b0: q("zeeman_B0", Dimension::Frequency)?,
            zeeman_b1: q("zeeman_B1", Dimension::Frequency)?,
            pump_rate: q("pump_rate_Gamma", Dimension::Rate)?,
            dephase_rate: q("dephase_rate_Gamma1", Dimension::Rate)?,
            nv_count,
            bath_temperature: opt("bath_temperature_T", Dimension::Temperature)?.unwrap_or(0.0),
            rate_convention: conv,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json_value(&serde_json::from_str(s)?)
    }

    /// Loads a config file and applies `key=value` overrides (values use the
    /// `NUMBER:UNIT` shorthand).
    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        let mut doc: Value = serde_json::from_str(&text)?;
        apply_overrides(&mut doc, overrides)?;
        Self::from_json_value(&doc)
    }

    /// Canonical SI rendering of the resolved parameters.
    pub fn resolved_json(&self) -> Value {
        json!({
            "semi_major_a_m": self.semi_major_a,
            "semi_minor_b_m": self.semi_minor_b,
            "mass_density_kg_per_m3": self.mass_density,
            "dielectric_const": self.dielectric_const,
            "laser_power_W": self.laser_power,
            "beam_area_m2": self.beam_area,
            "zero_field_splitting_rad_per_s": self.zero_field_splitting,
            "microwave_freq_rad_per_s": self.microwave_freq(),
            "microwave_source": match self.microwave {
                MicrowaveDrive::CrossingAngle(_) => "crossing_angle_beta0",
                MicrowaveDrive::Frequency(_) => "microwave_freq_omega",
                MicrowaveDrive::RestDetuning(_) => "delta_plus_at_rest",
            },
            "crossing_angle_beta0_rad": self.crossing_angle(),
            "zeeman_B0_rad_per_s": self.zeeman_b0,
            "zeeman_B1_rad_per_s": self.zeeman_b1,
            "pump_rate_Gamma_rad_per_s": self.pump_rate,
            "dephase_rate_Gamma1_rad_per_s": self.dephase_rate,
            "nv_count_n": self.nv_count,
            "bath_temperature_K": self.bath_temperature,
            "rates_are_angular": self.rate_convention.rates_are_angular(),
        })
    }

    /// SHA-256 of the canonical resolved config, hex encoded.
    pub fn fingerprint(&self) -> String {
        let text = serde_json::to_string(&self.resolved_json()).expect("plain JSON");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Replaces (or inserts) config keys with `NUMBER:UNIT` literals.
pub fn apply_overrides(doc: &mut Value, overrides: &[(String, String)]) -> Result<()> {
    let obj: &mut Map<String, Value> = doc
        .as_object_mut()
        .ok_or_else(|| Error::InvalidConfig("config must be a JSON object".into()))?;
    for (k, raw) in overrides {
        if !KEYS.contains(&k.as_str()) {
            return Err(Error::InvalidConfig(format!("unknown config key `{k}`")));
        }
        let v = parse_tagged_literal(raw)?;
        // A new way of fixing ω displaces the others.
        if matches!(
            k.as_str(),
            "microwave_freq_omega" | "crossing_angle_beta0" | "delta_plus_at_rest"
        ) {
            for other in [
                "microwave_freq_omega",
                "crossing_angle_beta0",
                "delta_plus_at_rest",
            ] {
                obj.remove(other);
            }
        }
        obj.insert(k.clone(), v);
    }
    Ok(())
}

/// Depolarization factor along the symmetry (major) axis of a prolate
/// spheroid, L_z = (1−e²)/e² · (atanh(e)/e − 1), e² = 1 − b²/a².
pub fn prolate_depolarization(a: f64, b: f64) -> f64 {
    let e2 = 1.0 - (b * b) / (a * a);
    if e2 < 1e-6 {
        // series about the sphere
        return 1.0 / 3.0 - 2.0 * e2 / 15.0 - 2.0 * e2 * e2 / 35.0;
    }
    let e = e2.sqrt();
    (1.0 - e2) / e2 * (e.atanh() / e - 1.0)
}

/// Principal polarizabilities (α_x, α_z) in C·m²/V of a prolate spheroid in
/// the electrostatic limit.
pub fn derive_polarizabilities(cfg: &SystemConfig) -> Result<(f64, f64)> {
    let (a, b, eps) = (cfg.semi_major_a, cfg.semi_minor_b, cfg.dielectric_const);
    if a < b {
        return Err(Error::Oblate { a, b });
    }
    if !(b > 0.0) || eps < 1.0 {
        return Err(Error::InvalidConfig(
            "need b > 0 and dielectric_const >= 1".into(),
        ));
    }
    let lz = prolate_depolarization(a, b);
    let lx = if a == b { lz } else { 0.5 * (1.0 - lz) };
    let vol = 4.0 / 3.0 * PI * a * b * b;
    let pol = |l: f64| EPSILON_0 * vol * (eps - 1.0) / (1.0 + l * (eps - 1.0));
    Ok((pol(lx), pol(lz)))
}

/// Angular range allowed by the trap at the bath temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Confinement {
    Confined {
        beta_m: f64,
    },
    /// Thermal energy exceeds the orientational trap depth (or no anisotropy).
    Unconfined,
}

impl Confinement {
    pub fn beta_m(&self) -> Option<f64> {
        match *self {
            Confinement::Confined { beta_m } => Some(beta_m),
            Confinement::Unconfined => None,
        }
    }
}

/// Derived optical-trap quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapModel {
    pub polarizability_x: f64,
    pub polarizability_z: f64,
    /// Peak field amplitude squared at the waist, E₀² (V²/m²).
    pub field_sq_e2: f64,
    /// U(π/2) − U(0) (J).
    pub trap_depth: f64,
    /// k in U ≈ const + ½kβ² (J/rad²).
    pub trap_stiffness_k: f64,
    pub inertia_i1: f64,
    pub inertia_i3: f64,
    pub libration_freq_omega0: f64,
    pub confinement: Confinement,
    pub no_cooling: bool,
}

impl TrapModel {
    /// Time-averaged orientational potential U(β) = −¼α_xE₀² − ¼(α_z−α_x)E₀²cos²β.
    pub fn potential(&self, beta: f64) -> f64 {
        let ax = self.polarizability_x;
        let dz = self.polarizability_z - self.polarizability_x;
        -0.25 * ax * self.field_sq_e2 - 0.25 * dz * self.field_sq_e2 * beta.cos().powi(2)
    }

    /// Restoring torque −∂U/∂β of the full potential.
    pub fn restoring_torque(&self, beta: f64) -> f64 {
        -0.5 * self.trap_stiffness_k * (2.0 * beta).sin()
    }

    /// Depth expressed as a temperature, T₀ = depth/k_B.
    pub fn depth_temperature(&self) -> f64 {
        self.trap_depth / K_B
    }

    /// Half-angle reached by a rotor with thermal energy ½k_BT:
    /// k_BT₀ sin²β_m = ½k_BT.
    pub fn confinement_at(&self, temperature: f64) -> Confinement {
        if !(self.trap_depth > 0.0) {
            return Confinement::Unconfined;
        }
        let s2 = 0.5 * K_B * temperature / self.trap_depth;
        if s2 >= 1.0 {
            Confinement::Unconfined
        } else {
            Confinement::Confined {
                beta_m: s2.sqrt().asin(),
            }
        }
    }
}

/// Evaluates the waist-plane trap for `cfg`.
pub fn derive_trap(cfg: &SystemConfig) -> Result<TrapModel> {
    if !(cfg.beam_area > 0.0) || !(cfg.laser_power > 0.0) {
        return Err(Error::InvalidConfig(
            "laser_power and beam_area must be > 0".into(),
        ));
    }
    let (ax, az) = derive_polarizabilities(cfg)?;
    // ε₀E₀² = 2P/(πcw²)
    let e2 = 2.0 * cfg.laser_power / (cfg.beam_area * SPEED_OF_LIGHT * EPSILON_0);
    let trap_depth = 0.25 * (az - ax) * e2;
    let k = 0.5 * (az - ax) * e2;
    let (a, b, rho) = (cfg.semi_major_a, cfg.semi_minor_b, cfg.mass_density);
    let i1 = 4.0 * PI / 15.0 * rho * a * b * b * (a * a + b * b);
    let i3 = 8.0 * PI / 15.0 * rho * a * b.powi(4);
    let mut trap = TrapModel {
        polarizability_x: ax,
        polarizability_z: az,
        field_sq_e2: e2,
        trap_depth,
        trap_stiffness_k: k,
        inertia_i1: i1,
        inertia_i3: i3,
        libration_freq_omega0: (k / i1).sqrt(),
        confinement: Confinement::Unconfined,
        no_cooling: cfg.is_no_cooling(),
    };
    trap.confinement = trap.confinement_at(cfg.bath_temperature);
    Ok(trap)
}
