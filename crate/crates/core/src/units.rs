//! Dimension-tagged quantities.
//!
//! Public numerical APIs take plain SI `f64`; [`UnitValue`] is used where a value
//! crosses a text boundary (scenario keys, reports) and its dimension must be checked.

use std::fmt;
use std::ops::{Div, Mul};

use crate::constants::E_CHARGE;
use crate::error::{Error, Result};

/// Exponents of (length, mass, time).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dimension {
    pub length: i8,
    pub mass: i8,
    pub time: i8,
}

impl Dimension {
    pub const fn new(length: i8, mass: i8, time: i8) -> Self {
        Self { length, mass, time }
    }
    pub const NONE: Self = Self::new(0, 0, 0);
    pub const LENGTH: Self = Self::new(1, 0, 0);
    pub const MASS: Self = Self::new(0, 1, 0);
    pub const TIME: Self = Self::new(0, 0, 1);
    pub const VELOCITY: Self = Self::new(1, 0, -1);
    pub const ACCELERATION: Self = Self::new(1, 0, -2);
    pub const ENERGY: Self = Self::new(2, 1, -2);
    pub const RATE: Self = Self::new(0, 0, -1);

    fn symbol(self) -> String {
        let named = [
            (Self::NONE, "1"),
            (Self::LENGTH, "m"),
            (Self::MASS, "kg"),
            (Self::TIME, "s"),
            (Self::VELOCITY, "m/s"),
            (Self::ACCELERATION, "m/s^2"),
            (Self::ENERGY, "J"),
            (Self::RATE, "1/s"),
        ];
        if let Some((_, s)) = named.iter().find(|(d, _)| *d == self) {
            return s.to_string();
        }
        format!("m^{} kg^{} s^{}", self.length, self.mass, self.time)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol())
    }
}

/// A value in SI base units with its dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitValue {
    pub value: f64,
    pub dim: Dimension,
}

impl UnitValue {
    pub const fn new(value: f64, dim: Dimension) -> Self {
        Self { value, dim }
    }
    pub const fn meters(v: f64) -> Self {
        Self::new(v, Dimension::LENGTH)
    }
    pub const fn seconds(v: f64) -> Self {
        Self::new(v, Dimension::TIME)
    }
    pub const fn kilograms(v: f64) -> Self {
        Self::new(v, Dimension::MASS)
    }
    pub const fn meters_per_second(v: f64) -> Self {
        Self::new(v, Dimension::VELOCITY)
    }
    pub const fn acceleration(v: f64) -> Self {
        Self::new(v, Dimension::ACCELERATION)
    }
    pub const fn joules(v: f64) -> Self {
        Self::new(v, Dimension::ENERGY)
    }
    pub fn electron_volts(v: f64) -> Self {
        Self::new(v * E_CHARGE, Dimension::ENERGY)
    }
    pub const fn dimensionless(v: f64) -> Self {
        Self::new(v, Dimension::NONE)
    }

    /// Returns the SI value if the dimension matches.
    pub fn expect(self, dim: Dimension) -> Result<f64> {
        if self.dim == dim {
            Ok(self.value)
        } else {
            Err(Error::UnitMismatch { expected: dim.to_string(), got: self.dim.to_string() })
        }
    }

    pub fn to_ev(self) -> Result<f64> {
        self.expect(Dimension::ENERGY).map(|e| e / E_CHARGE)
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        self.expect(rhs.dim)?;
        Ok(Self::new(self.value + rhs.value, self.dim))
    }

    pub fn powi(self, n: i8) -> Self {
        Self::new(
            self.value.powi(n as i32),
            Dimension::new(self.dim.length * n, self.dim.mass * n, self.dim.time * n),
        )
    }

    /// Parses a unit suffix used in scenario keys (`_m`, `_um`, `_eV`, `_mps`, ...).
    pub fn from_suffix(value: f64, suffix: &str) -> Result<Self> {
        let v = match suffix {
            "m" => Self::meters(value),
            "mm" => Self::meters(value * 1e-3),
            "um" => Self::meters(value * 1e-6),
            "nm" => Self::meters(value * 1e-9),
            "cm" => Self::meters(value * 1e-2),
            "s" => Self::seconds(value),
            "ms" => Self::seconds(value * 1e-3),
            "us" => Self::seconds(value * 1e-6),
            "kg" => Self::kilograms(value),
            "mps" => Self::meters_per_second(value),
            "mps2" => Self::acceleration(value),
            "g" => Self::acceleration(value * crate::constants::G_STANDARD),
            "eV" | "ev" => Self::electron_volts(value),
            "J" => Self::joules(value),
            "per_s" => Self::new(value, Dimension::RATE),
            "1" => Self::dimensionless(value),
            other => return Err(Error::Validation(format!("unknown unit suffix `{other}`"))),
        };
        Ok(v)
    }
}

impl Mul for UnitValue {
    type Output = UnitValue;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.value * rhs.value,
            Dimension::new(
                self.dim.length + rhs.dim.length,
                self.dim.mass + rhs.dim.mass,
                self.dim.time + rhs.dim.time,
            ),
        )
    }
}

impl Div for UnitValue {
    type Output = UnitValue;
    fn div(self, rhs: Self) -> Self {
        Self::new(
            self.value / rhs.value,
            Dimension::new(
                self.dim.length - rhs.dim.length,
                self.dim.mass - rhs.dim.mass,
                self.dim.time - rhs.dim.time,
            ),
        )
    }
}

impl fmt::Display for UnitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == Dimension::ENERGY {
            write!(f, "{:.6e} eV", self.value / E_CHARGE)
        } else {
            write!(f, "{:.6e} {}", self.value, self.dim)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_from_mass_times_velocity_squared() {
        let e = UnitValue::kilograms(2.0) * UnitValue::meters_per_second(3.0).powi(2);
        assert_eq!(e.expect(Dimension::ENERGY).unwrap(), 18.0);
    }

    #[test]
    fn mismatched_add_is_rejected() {
        let r = UnitValue::meters(1.0).checked_add(UnitValue::seconds(1.0));
        assert!(matches!(r, Err(Error::UnitMismatch { .. })));
    }

    #[test]
    fn suffixes() {
        assert!((UnitValue::from_suffix(40.0, "um").unwrap().value / 40e-6 - 1.0).abs() < 1e-15);
        assert!((UnitValue::from_suffix(1.0, "eV").unwrap().to_ev().unwrap() - 1.0).abs() < 1e-15);
        assert!(UnitValue::from_suffix(1.0, "furlong").is_err());
    }
}
