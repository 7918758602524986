//! Physical constants (CODATA 2018, SI).

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge (C); also J per eV.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Neutron mass (kg).
pub const M_NEUTRON: f64 = 1.674_927_498_04e-27;
/// Hydrogen atom mass (kg).
pub const M_HYDROGEN: f64 = 1.673_532_8e-27;
/// Electron mass (kg).
pub const M_ELECTRON: f64 = 9.109_383_701_5e-31;
/// Muon mass (kg).
pub const M_MUON: f64 = 1.883_531_627e-28;
/// Standard acceleration of gravity (m/s^2).
pub const G_STANDARD: f64 = 9.806_65;

/// Muon lifetime (s).
pub const TAU_MUON: f64 = 2.196_981_1e-6;
/// Positronium 1S (ortho) lifetime (s).
pub const TAU_PS_1S: f64 = 1.42e-7;
/// Positronium 2S lifetime (s).
pub const TAU_PS_2S: f64 = 1.136e-6;
/// Rydberg positronium (n = 33) lifetime (s).
pub const TAU_PS_RYDBERG: f64 = 1.0e-5;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Joules to electron-volts.
#[inline]
pub fn j_to_ev(e: f64) -> f64 {
    e / E_CHARGE
}

/// Electron-volts to joules.
#[inline]
pub fn ev_to_j(e: f64) -> f64 {
    e * E_CHARGE
}
