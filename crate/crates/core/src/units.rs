//! Unit-tagged scalar inputs.
//!
//! A dimensional config value is written as a single-key object whose key is
//! the unit, e.g. `{"nm": 40}` or `{"MHz": 100}`. Frequencies are stored as
//! angular frequencies (rad/s): cycle units (`Hz`, `kHz`, `MHz`, `GHz`) are
//! multiplied by 2π, while `rad_per_s` and `per_us` are taken verbatim.

use serde_json::Value;

use crate::consts::TWO_PI;
use crate::error::{Error, Result};

/// Physical dimension of a config quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Density,
    Power,
    Area,
    /// Field couplings, splittings and drive frequencies.
    Frequency,
    /// Phenomenological decay rates; cycle units obey the rate convention.
    Rate,
    Angle,
    Temperature,
}

/// How cycle-unit values of the decay rates Γ and Γ₁ are read.
///
/// Rates appear both as "0.4 MHz" and as
/// "0.4 μs⁻¹/2π"; neither reading is authoritative, so it is a switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RateConvention {
    /// "0.4 MHz" means Γ = 0.4×10⁶ s⁻¹.
    Angular,
    /// "0.4 MHz" means Γ = 2π×0.4×10⁶ s⁻¹.
    Cyclic,
}

impl RateConvention {
    pub fn from_flag(rates_are_angular: bool) -> Self {
        if rates_are_angular {
            RateConvention::Angular
        } else {
            RateConvention::Cyclic
        }
    }

    pub fn rates_are_angular(self) -> bool {
        self == RateConvention::Angular
    }
}

fn scale(key: &str, unit: &str, dim: Dimension, conv: RateConvention) -> Result<f64> {
    use Dimension::*;
    let unknown = || Error::UnknownUnit {
        key: key.to_string(),
        unit: unit.to_string(),
    };
    let cycles = |f: f64| match dim {
        Rate if conv == RateConvention::Angular => f,
        _ => f * TWO_PI,
    };
    let s = match (dim, unit) {
        (Length, "m") => 1.0,
        (Length, "um") => 1e-6,
        (Length, "nm") => 1e-9,
        (Density, "kg_per_m3") => 1.0,
        (Density, "g_per_cm3") => 1e3,
        (Power, "W") => 1.0,
        (Power, "mW") => 1e-3,
        (Power, "uW") => 1e-6,
        (Area, "m2") => 1.0,
        (Area, "um2") => 1e-12,
        (Frequency | Rate, "rad_per_s") => 1.0,
        (Frequency | Rate, "per_us") => 1e6,
        (Frequency | Rate, "Hz") => cycles(1.0),
        (Frequency | Rate, "kHz") => cycles(1e3),
        (Frequency | Rate, "MHz") => cycles(1e6),
        (Frequency | Rate, "GHz") => cycles(1e9),
        (Angle, "rad") => 1.0,
        (Angle, "deg") => std::f64::consts::PI / 180.0,
        (Temperature, "K") => 1.0,
        _ => return Err(unknown()),
    };
    Ok(s)
}

/// Reads a unit-tagged value and converts it to the internal SI/rad-per-second
/// convention.
pub fn parse_quantity(key: &str, v: &Value, dim: Dimension, conv: RateConvention) -> Result<f64> {
    let obj = v.as_object().ok_or_else(|| {
        Error::InvalidConfig(format!(
            "`{key}` must be a unit-tagged object like {{\"unit\": value}}"
        ))
    })?;
    if obj.len() != 1 {
        return Err(Error::InvalidConfig(format!(
            "`{key}` must carry exactly one unit tag, found {}",
            obj.len()
        )));
    }
    let (unit, raw) = obj.iter().next().expect("len checked");
    let x = raw
        .as_f64()
        .ok_or_else(|| Error::InvalidConfig(format!("`{key}`: value is not a number")))?;
    if !x.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "`{key}`: value is not finite"
        )));
    }
    Ok(x * scale(key, unit, dim, conv)?)
}

/// Parses command-line shorthand `NUMBER:UNIT` (or a bare number) into the
/// JSON shape accepted by the config loader.
pub fn parse_tagged_literal(raw: &str) -> Result<Value> {
    let raw = raw.trim();
    if let Some((num, unit)) = raw.split_once(':') {
        let x: f64 = num
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("not a number: `{num}`")))?;
        let mut m = serde_json::Map::new();
        m.insert(unit.trim().to_string(), serde_json::json!(x));
        return Ok(Value::Object(m));
    }
    match raw {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        _ => {}
    }
    if let Ok(i) = raw.parse::<u64>() {
        return Ok(serde_json::json!(i));
    }
    raw.parse::<f64>()
        .map(|x| serde_json::json!(x))
        .map_err(|_| Error::InvalidConfig(format!("cannot parse value `{raw}`")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn cycle_units_get_two_pi() {
        let v = parse_quantity(
            "zeeman_B0",
            &json!({"MHz": 100.0}),
            Dimension::Frequency,
            RateConvention::Angular,
        )
        .unwrap();
        assert!((v - TWO_PI * 1e8).abs() < 1e-3);
    }

    #[test]
    fn rate_convention_switch() {
        let v = json!({"MHz": 5.0});
        let a = parse_quantity("g", &v, Dimension::Rate, RateConvention::Angular).unwrap();
        let c = parse_quantity("g", &v, Dimension::Rate, RateConvention::Cyclic).unwrap();
        assert_eq!(a, 5e6);
        assert!((c / a - TWO_PI).abs() < 1e-15);
        let r = parse_quantity(
            "g",
            &json!({"rad_per_s": 7.0}),
            Dimension::Rate,
            RateConvention::Cyclic,
        )
        .unwrap();
        assert_eq!(r, 7.0);
    }

    #[test]
    fn rejects_untagged_and_unknown() {
        assert!(
            parse_quantity("a", &json!(4.0), Dimension::Length, RateConvention::Angular).is_err()
        );
        assert!(matches!(
            parse_quantity(
                "a",
                &json!({"furlong": 4.0}),
                Dimension::Length,
                RateConvention::Angular
            ),
            Err(Error::UnknownUnit { .. })
        ));
        assert!(parse_quantity(
            "a",
            &json!({"nm": 4.0, "m": 1.0}),
            Dimension::Length,
            RateConvention::Angular
        )
        .is_err());
    }

    #[test]
    fn literal_shorthand() {
        assert_eq!(parse_tagged_literal("50:mW").unwrap(), json!({"mW": 50.0}));
        assert_eq!(parse_tagged_literal("4").unwrap(), json!(4));
        assert_eq!(parse_tagged_literal("false").unwrap(), json!(false));
        assert!(parse_tagged_literal("x:nm").is_err());
    }
}
