//! From the exit-face packet to observables: detector flux, resolution, surface current.

pub mod beat;
pub mod far_field;
pub mod pattern;
pub mod resolution;
pub mod spectrum;
pub mod surface;

pub use beat::{beat_periods, closest_relative_error, matrix_pencil};
pub use far_field::{
    far_field_flux, far_field_regime, fresnel_amplitude, fresnel_flux, DetectorConfig, FarFieldRegime,
    FAR_FIELD_GOOD_RATIO, FAR_FIELD_MIN_RATIO,
};
pub use pattern::{Axis, InterferencePattern};
pub use resolution::{convolve_resolution, fall_shift, fringe_contrast, CONTRAST_FLOOR, gaussian_blur, shift_row, velocity_boxcar};
pub use spectrum::{to_spectrum, SpectralPacket};
pub use surface::surface_current;
