//! Characteristic energy, length and time of a particle in a uniform field.

use crate::constants::HBAR;
use crate::error::{ensure, Result};

/// Scales of the linear potential m*a*x above a hard wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicScales {
    /// (hbar^2 m a^2 / 2)^(1/3), J.
    pub energy: f64,
    /// energy / (m a), m.
    pub length: f64,
    /// hbar / energy, s.
    pub time: f64,
}

pub fn characteristic_scales(mass_kg: f64, accel: f64) -> Result<CharacteristicScales> {
    ensure(mass_kg > 0.0 && mass_kg.is_finite(), || format!("mass must be positive, got {mass_kg}"))?;
    ensure(accel > 0.0 && accel.is_finite(), || {
        format!("acceleration must be positive, got {accel}")
    })?;
    let energy = (HBAR * HBAR * mass_kg * accel * accel / 2.0).cbrt();
    Ok(CharacteristicScales { energy, length: energy / (mass_kg * accel), time: HBAR / energy })
}

/// Acceleration whose characteristic time equals `tau`: a = sqrt(2 hbar / (m tau^3)).
pub fn acceleration_for_time(mass_kg: f64, tau: f64) -> Result<f64> {
    ensure(mass_kg > 0.0 && tau > 0.0, || "mass and time must be positive".into())?;
    Ok((2.0 * HBAR / (mass_kg * tau.powi(3))).sqrt())
}

/// a = v^2 / R.
pub fn centrifugal_acceleration(velocity: f64, radius: f64) -> Result<f64> {
    ensure(radius > 0.0 && radius.is_finite(), || format!("radius must be positive, got {radius}"))?;
    ensure(velocity.is_finite(), || "velocity must be finite".into())?;
    Ok(velocity * velocity / radius)
}
