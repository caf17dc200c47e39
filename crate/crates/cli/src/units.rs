//! Unit-tagged scalar strings such as `"5 meV"`, `"1.7 ps^-1"` or `"10 K"`.

use polariton_engine::UnitSystem;

use crate::config::ConfigError;

/// Physical dimension expected by a config field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// Energies and rates share ps⁻¹ with ħ = 1.
    Energy,
    Temperature,
    Time,
}

impl Dimension {
    fn accepted(self) -> &'static str {
        match self {
            Dimension::Energy => "meV, eV or ps^-1",
            Dimension::Temperature => "K",
            Dimension::Time => "fs, ps or ns",
        }
    }

    /// Canonical tag used when writing configs.
    pub fn canonical_unit(self) -> &'static str {
        match self {
            Dimension::Energy => "ps^-1",
            Dimension::Temperature => "K",
            Dimension::Time => "ps",
        }
    }
}

/// Parses `"<number> <unit>"` into internal units (ps⁻¹, K, ps).
pub fn parse_quantity(field: &str, raw: &str, dim: Dimension) -> Result<f64, ConfigError> {
    let mut parts = raw.split_whitespace();
    let (Some(number), Some(unit), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(ConfigError::new(
            field,
            format!("expected \"<number> <unit>\" with unit {}, got {raw:?}", dim.accepted()),
        ));
    };
    let value: f64 = number
        .parse()
        .map_err(|_| ConfigError::new(field, format!("`{number}` is not a number")))?;
    if !value.is_finite() {
        return Err(ConfigError::new(field, "must be finite"));
    }
    let units = UnitSystem::standard();
    let converted = match (dim, unit) {
        (Dimension::Energy, "meV") => units.from_mev(value),
        (Dimension::Energy, "eV") => units.from_ev(value),
        (Dimension::Energy, "ps^-1" | "ps⁻¹" | "1/ps") => value,
        (Dimension::Temperature, "K") => value,
        (Dimension::Time, "ps") => value,
        (Dimension::Time, "fs") => value * 1e-3,
        (Dimension::Time, "ns") => value * 1e3,
        _ => {
            return Err(ConfigError::new(
                field,
                format!("unit `{unit}` does not match the expected {}", dim.accepted()),
            ))
        }
    };
    Ok(converted)
}

/// Writes a value in its canonical unit; the shortest round-trip float
/// representation makes `parse_quantity(format_quantity(x)) == x`.
pub fn format_quantity(value: f64, dim: Dimension) -> String {
    format!("{value:?} {}", dim.canonical_unit())
}
