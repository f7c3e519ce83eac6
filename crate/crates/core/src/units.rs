//! SI constants, energy conversions and quantity strings such as `"4 meV"`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// One electronvolt in joules.
pub const ELECTRONVOLT: f64 = ELEMENTARY_CHARGE;
/// One debye in C·m.
pub const DEBYE: f64 = 3.335_640_952e-30;

pub fn ev_to_joule(ev: f64) -> f64 {
    ev * ELECTRONVOLT
}

pub fn joule_to_ev(j: f64) -> f64 {
    j / ELECTRONVOLT
}

pub fn mev_to_joule(mev: f64) -> f64 {
    mev * 1e-3 * ELECTRONVOLT
}

pub fn joule_to_mev(j: f64) -> f64 {
    j / ELECTRONVOLT * 1e3
}

pub fn ev_to_mev(ev: f64) -> f64 {
    ev * 1e3
}

pub fn mev_to_ev(mev: f64) -> f64 {
    mev * 1e-3
}

/// Physical dimension of a parsed quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Time,
    /// Angular frequency or rate; stored in rad/s (equivalently 1/s).
    Frequency,
    Length,
    Volume,
    Energy,
    ElectricField,
    Temperature,
    DipoleMoment,
    Wavenumber,
    Angle,
    Speed,
    MomentOfInertia,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Time => "time",
            Dimension::Frequency => "frequency",
            Dimension::Length => "length",
            Dimension::Volume => "volume",
            Dimension::Energy => "energy",
            Dimension::ElectricField => "electric field",
            Dimension::Temperature => "temperature",
            Dimension::DipoleMoment => "dipole moment",
            Dimension::Wavenumber => "wavenumber",
            Dimension::Angle => "angle",
            Dimension::Speed => "speed",
            Dimension::MomentOfInertia => "moment of inertia",
        };
        f.write_str(s)
    }
}

const TWO_PI: f64 = 2.0 * PI;

/// Recognised unit symbols with their SI factor and dimension.
/// Cycle frequencies (Hz) convert to rad/s.
const UNITS: &[(&str, f64, Dimension)] = &[
    ("s", 1.0, Dimension::Time),
    ("ms", 1e-3, Dimension::Time),
    ("us", 1e-6, Dimension::Time),
    ("µs", 1e-6, Dimension::Time),
    ("ns", 1e-9, Dimension::Time),
    ("ps", 1e-12, Dimension::Time),
    ("fs", 1e-15, Dimension::Time),
    ("rad/s", 1.0, Dimension::Frequency),
    ("1/s", 1.0, Dimension::Frequency),
    ("s^-1", 1.0, Dimension::Frequency),
    ("Hz", TWO_PI, Dimension::Frequency),
    ("kHz", TWO_PI * 1e3, Dimension::Frequency),
    ("MHz", TWO_PI * 1e6, Dimension::Frequency),
    ("GHz", TWO_PI * 1e9, Dimension::Frequency),
    ("THz", TWO_PI * 1e12, Dimension::Frequency),
    ("m", 1.0, Dimension::Length),
    ("cm", 1e-2, Dimension::Length),
    ("mm", 1e-3, Dimension::Length),
    ("um", 1e-6, Dimension::Length),
    ("µm", 1e-6, Dimension::Length),
    ("nm", 1e-9, Dimension::Length),
    ("A", 1e-10, Dimension::Length),
    ("Å", 1e-10, Dimension::Length),
    ("pm", 1e-12, Dimension::Length),
    ("m3", 1.0, Dimension::Volume),
    ("m^3", 1.0, Dimension::Volume),
    ("nm3", 1e-27, Dimension::Volume),
    ("nm^3", 1e-27, Dimension::Volume),
    ("J", 1.0, Dimension::Energy),
    ("eV", ELECTRONVOLT, Dimension::Energy),
    ("meV", 1e-3 * ELECTRONVOLT, Dimension::Energy),
    ("ueV", 1e-6 * ELECTRONVOLT, Dimension::Energy),
    ("µeV", 1e-6 * ELECTRONVOLT, Dimension::Energy),
    ("V/m", 1.0, Dimension::ElectricField),
    ("kV/m", 1e3, Dimension::ElectricField),
    ("K", 1.0, Dimension::Temperature),
    ("C*m", 1.0, Dimension::DipoleMoment),
    ("C·m", 1.0, Dimension::DipoleMoment),
    ("D", DEBYE, Dimension::DipoleMoment),
    ("1/m", 1.0, Dimension::Wavenumber),
    ("1/nm", 1e9, Dimension::Wavenumber),
    ("rad", 1.0, Dimension::Angle),
    ("deg", PI / 180.0, Dimension::Angle),
    ("m/s", 1.0, Dimension::Speed),
    ("kg*m2", 1.0, Dimension::MomentOfInertia),
    ("kg*m^2", 1.0, Dimension::MomentOfInertia),
];

fn lookup_unit(symbol: &str) -> Option<(f64, Dimension)> {
    UNITS
        .iter()
        .find(|(s, _, _)| *s == symbol)
        .map(|&(_, factor, dim)| (factor, dim))
}

/// A number with an explicit unit, kept in the form it was written so that
/// configurations serialize back unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    value: f64,
    unit: String,
    factor: f64,
    dimension: Dimension,
}

impl Quantity {
    pub fn new(value: f64, unit: &str) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Config(format!("quantity value {value} is not finite")));
        }
        let (factor, dimension) = lookup_unit(unit).ok_or_else(|| Error::Config(format!("unknown unit '{unit}'")))?;
        Ok(Self {
            value,
            unit: unit.to_string(),
            factor,
            dimension,
        })
    }

    /// Builds a quantity from an SI value, expressed in the SI unit of `dimension`.
    pub fn from_si(value: f64, dimension: Dimension) -> Self {
        let unit = match dimension {
            Dimension::Time => "s",
            Dimension::Frequency => "rad/s",
            Dimension::Length => "m",
            Dimension::Volume => "m3",
            Dimension::Energy => "J",
            Dimension::ElectricField => "V/m",
            Dimension::Temperature => "K",
            Dimension::DipoleMoment => "C*m",
            Dimension::Wavenumber => "1/m",
            Dimension::Angle => "rad",
            Dimension::Speed => "m/s",
            Dimension::MomentOfInertia => "kg*m2",
        };
        Self::new(value, unit).expect("SI units are always registered")
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn si(&self) -> f64 {
        self.value * self.factor
    }

    /// SI value, provided the dimension matches; `key` names the config entry in errors.
    pub fn si_as(&self, dimension: Dimension, key: &str) -> Result<f64> {
        if self.dimension != dimension {
            return Err(Error::Config(format!(
                "{key}: expected a {dimension}, got '{self}' ({})",
                self.dimension
            )));
        }
        Ok(self.si())
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit)
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (number, unit) = match s.split_once(char::is_whitespace) {
            Some((n, u)) => (n, u.trim()),
            None => {
                // "4meV": longest numeric prefix
                let split = (1..=s.len())
                    .rev()
                    .filter(|&i| s.is_char_boundary(i))
                    .find(|&i| s[..i].parse::<f64>().is_ok())
                    .ok_or_else(|| Error::Config(format!("'{s}' does not start with a number")))?;
                (&s[..split], &s[split..])
            }
        };
        let value: f64 = number
            .parse()
            .map_err(|_| Error::Config(format!("'{s}': cannot parse '{number}' as a number")))?;
        if unit.is_empty() {
            return Err(Error::Config(format!("'{s}' is missing a unit")));
        }
        Quantity::new(value, unit).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("'{s}': {msg}")),
            other => other,
        })
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_spaced_and_compact_forms() {
        let q: Quantity = "4 meV".parse().unwrap();
        assert_eq!(q.dimension(), Dimension::Energy);
        assert!((q.si() - 4e-3 * ELECTRONVOLT).abs() < 1e-35);
        let q: Quantity = "1e-6m".parse().unwrap();
        assert_eq!(q.unit(), "m");
        assert_eq!(q.si(), 1e-6);
        let q: Quantity = "5e-22 m3".parse().unwrap();
        assert_eq!(q.dimension(), Dimension::Volume);
        let q: Quantity = "2.5 C*m".parse().unwrap();
        assert_eq!(q.dimension(), Dimension::DipoleMoment);
    }

    #[test]
    fn hertz_converts_to_angular_frequency() {
        let q: Quantity = "1 THz".parse().unwrap();
        assert!((q.si() - 2.0 * PI * 1e12).abs() < 1e-3);
        let q: Quantity = "3 rad/s".parse().unwrap();
        assert_eq!(q.si(), 3.0);
    }

    #[test]
    fn malformed_strings_are_rejected() {
        for bad in ["", "meV", "4", "4 furlongs", "four meV", "nan s", "1e400 s"] {
            assert!(matches!(bad.parse::<Quantity>(), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn dimension_mismatch_names_the_key() {
        let q: Quantity = "4 meV".parse().unwrap();
        let err = q.si_as(Dimension::Time, "t_final").unwrap_err();
        assert!(err.to_string().contains("t_final"));
    }

    #[test]
    fn serde_round_trip_keeps_written_form() {
        let q: Quantity = serde_json::from_str("\"1e-4 s\"").unwrap();
        assert_eq!(serde_json::to_string(&q).unwrap(), "\"0.0001 s\"");
        let again: Quantity = serde_json::from_str(&serde_json::to_string(&q).unwrap()).unwrap();
        assert_eq!(again, q);
        assert!(serde_json::from_str::<Quantity>("\"3 parsecs\"").is_err());
    }

    #[test]
    fn from_si_uses_base_unit() {
        let q = Quantity::from_si(2.0, Dimension::Frequency);
        assert_eq!(q.to_string(), "2 rad/s");
    }

    proptest! {
        #[test]
        fn energy_conversions_round_trip(x in -1e3f64..1e3) {
            let ev = x;
            prop_assert!((joule_to_ev(ev_to_joule(ev)) - ev).abs() <= 1e-12 * ev.abs().max(1e-300));
            prop_assert!((joule_to_mev(mev_to_joule(ev)) - ev).abs() <= 1e-12 * ev.abs().max(1e-300));
            prop_assert!((mev_to_ev(ev_to_mev(ev)) - ev).abs() <= 1e-12 * ev.abs().max(1e-300));
            let j = ev_to_joule(ev);
            prop_assert!((mev_to_joule(joule_to_mev(j)) - j).abs() <= 1e-12 * j.abs().max(1e-300));
        }

        #[test]
        fn display_parse_round_trip(v in -1e30f64..1e30, i in 0usize..UNITS.len()) {
            let q = Quantity::new(v, UNITS[i].0).unwrap();
            let back: Quantity = q.to_string().parse().unwrap();
            prop_assert_eq!(back, q);
        }
    }
}
