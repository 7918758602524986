use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

use super::spectrum::SpectralPacket;

/// Below this z/z0 the stationary-phase map is refused unless forced.
pub const FAR_FIELD_MIN_RATIO: f64 = 20.0;
/// Ratio from which the far-field map is considered fully converged.
pub const FAR_FIELD_GOOD_RATIO: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Mirror exit to detector distance (m).
    pub distance: f64,
    /// Acceleration pulling the beam toward negative x during the free flight (m/s^2).
    pub fall_accel: f64,
    /// Stated position resolution; the Gaussian kernel has sigma = resolution / 2 (m). Zero
    /// disables it.
    pub x_resolution: f64,
    /// Chopper opening time; a boxcar of width v^2 dt / tof_distance in velocity (s). Zero
    /// disables it.
    pub time_resolution: f64,
    /// Chopper to detector flight path used to convert time to velocity resolution (m).
    pub tof_distance: f64,
}

impl DetectorConfig {
    pub fn new(distance: f64) -> Self {
        Self { distance, fall_accel: 0.0, x_resolution: 0.0, time_resolution: 0.0, tof_distance: distance }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.distance > 0.0 && self.distance.is_finite(), || {
            format!("detector.distance must be positive, got {}", self.distance)
        })?;
        ensure(self.fall_accel.is_finite(), || "detector.fall_accel must be finite".into())?;
        ensure(self.x_resolution >= 0.0, || "detector.x_resolution must be >= 0".into())?;
        ensure(self.time_resolution >= 0.0, || "detector.time_resolution must be >= 0".into())?;
        ensure(self.tof_distance > 0.0, || "detector.tof_distance must be positive".into())?;
        Ok(())
    }

    /// Classical free-fall drop 0.5 a (D / v)^2.
    pub fn fall_shift(&self, velocity: f64) -> f64 {
        0.5 * self.fall_accel * (self.distance / velocity).powi(2)
    }

    /// Velocity boxcar width v^2 dt / D_tof.
    pub fn velocity_resolution(&self, velocity: f64) -> f64 {
        velocity * velocity * self.time_resolution / self.tof_distance
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FarFieldRegime {
    /// z/z0 >= 100.
    Converged,
    /// 20 <= z/z0 < 100.
    Marginal,
    /// z/z0 < 20.
    Invalid,
}

pub fn far_field_regime(ratio: f64) -> FarFieldRegime {
    if ratio >= FAR_FIELD_GOOD_RATIO {
        FarFieldRegime::Converged
    } else if ratio >= FAR_FIELD_MIN_RATIO {
        FarFieldRegime::Marginal
    } else {
        FarFieldRegime::Invalid
    }
}

/// Stationary-phase detector flux F(x) = w (k0/z) |psi~(k0 (x + s) / z)|^2 with s the fall drop
/// and w = n(v) v. Returns the flux and z/z0.
pub fn far_field_flux(
    spec: &SpectralPacket,
    det: &DetectorConfig,
    velocity: f64,
    xs: &[f64],
    weight: f64,
    force: bool,
) -> Result<(Vec<f64>, f64)> {
    det.validate()?;
    ensure(velocity > 0.0, || format!("velocity must be positive, got {velocity}"))?;
    let z = det.distance;
    let ratio = z / spec.z0();
    if far_field_regime(ratio) == FarFieldRegime::Invalid && !force {
        return Err(Error::Validation(format!(
            "z/z0 = {ratio:.3} is below {FAR_FIELD_MIN_RATIO}; the stationary-phase map is not valid (force to override)"
        )));
    }
    let shift = det.fall_shift(velocity);
    let scale = spec.k0 / z;
    let flux = xs.par_iter().map(|&x| weight * scale * spec.eval(scale * (x + shift)).norm_sqr()).collect();
    Ok((flux, ratio))
}

/// Fresnel propagation psi(x, z) = sqrt(k0 / (2 pi i z)) integral psi(x') exp(i k0 (x - x')^2 / 2z) dx'
/// by direct quadrature. Reference for the stationary-phase map.
pub fn fresnel_amplitude(spec: &SpectralPacket, z: f64, x: f64) -> Complex64 {
    let src = spec.source();
    let k0 = spec.k0;
    let pref = (Complex64::new(0.0, -1.0) * k0 / (2.0 * std::f64::consts::PI * z)).sqrt();
    let sum: Complex64 = src
        .psi
        .iter()
        .zip(src.grid.weights())
        .zip(src.grid.xs())
        .map(|((p, w), xp)| p * w * Complex64::from_polar(1.0, k0 * (x - xp).powi(2) / (2.0 * z)))
        .sum();
    pref * sum
}

/// Detector flux from direct Fresnel quadrature, w |psi(x, z)|^2 (no fall).
pub fn fresnel_flux(spec: &SpectralPacket, z: f64, xs: &[f64], weight: f64) -> Vec<f64> {
    xs.par_iter().map(|&x| weight * fresnel_amplitude(spec, z, x).norm_sqr()).collect()
}
