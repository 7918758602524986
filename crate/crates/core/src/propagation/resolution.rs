use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{ensure, Result};

use super::far_field::DetectorConfig;
use super::pattern::InterferencePattern;

/// Applies a Fourier multiplier to a uniformly sampled real row, zero-padded by `margin` samples
/// so that circular wrap-around lands in empty space.
fn fourier_filter(row: &[f64], dx: f64, margin: usize, multiplier: impl Fn(f64) -> Complex64) -> Vec<f64> {
    let n = (row.len() + 2 * margin + 16).next_power_of_two();
    let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
    for (b, &r) in buf.iter_mut().zip(row) {
        *b = Complex64::new(r, 0.0);
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let dq = std::f64::consts::TAU / (n as f64 * dx);
    for (j, b) in buf.iter_mut().enumerate() {
        let q = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 } * dq;
        *b *= multiplier(q);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf[..row.len()].iter().map(|b| (b.re / n as f64).max(0.0)).collect()
}

/// Convolution with a unit-area Gaussian of standard deviation `sigma`. Zero sigma is the
/// identity.
pub fn gaussian_blur(row: &[f64], dx: f64, sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return row.to_vec();
    }
    let margin = (8.0 * sigma / dx).ceil() as usize;
    fourier_filter(row, dx, margin, |q| Complex64::new((-0.5 * sigma * sigma * q * q).exp(), 0.0))
}

/// Resamples a row as f(x + shift) by Fourier interpolation.
pub fn shift_row(row: &[f64], dx: f64, shift: f64) -> Vec<f64> {
    if shift == 0.0 {
        return row.to_vec();
    }
    let margin = (shift.abs() / dx).ceil() as usize;
    fourier_filter(row, dx, margin, |q| Complex64::from_polar(1.0, q * shift))
}

/// Moves every row by its free-fall drop: F(x) -> F(x + 0.5 a (D/v)^2).
pub fn fall_shift(pattern: &InterferencePattern, det: &DetectorConfig) -> Result<InterferencePattern> {
    det.validate()?;
    let dx = pattern.spacing();
    let mut out = pattern.clone();
    out.values = pattern
        .velocities
        .par_iter()
        .zip(&pattern.values)
        .map(|(&v, row)| shift_row(row, dx, det.fall_shift(v)))
        .collect();
    out.set_meta("fall_accel_mps2", det.fall_accel);
    Ok(out)
}

/// Redistributes each velocity row over neighbouring rows with a boxcar of the given width
/// centred on its velocity. Each input row's weights sum to one, so flux inside the velocity
/// window is conserved exactly.
pub fn velocity_boxcar(pattern: &InterferencePattern, width: impl Fn(f64) -> f64) -> Result<InterferencePattern> {
    let nv = pattern.velocities.len();
    let mut out = pattern.clone();
    if nv < 2 {
        return Ok(out);
    }
    let dv = pattern.velocities[1] - pattern.velocities[0];
    ensure(dv > 0.0, || "velocities must increase".into())?;
    let nx = pattern.coords.len();
    out.values = vec![vec![0.0; nx]; nv];
    for (j, row) in pattern.values.iter().enumerate() {
        let v = pattern.velocities[j];
        let w = width(v);
        ensure(w >= 0.0 && w.is_finite(), || format!("velocity resolution must be >= 0, got {w}"))?;
        if w < 1e-12 * dv {
            out.values[j].iter_mut().zip(row).for_each(|(o, r)| *o += r);
            continue;
        }
        let (lo, hi) = (v - 0.5 * w, v + 0.5 * w);
        let k_lo = (((lo - pattern.velocities[0]) / dv) - 0.5).floor().max(0.0) as usize;
        let k_hi = ((((hi - pattern.velocities[0]) / dv) + 0.5).ceil() as usize).min(nv - 1);
        for k in k_lo..=k_hi {
            let (c_lo, c_hi) = (pattern.velocities[k] - 0.5 * dv, pattern.velocities[k] + 0.5 * dv);
            let overlap = (hi.min(c_hi) - lo.max(c_lo)).max(0.0) / w;
            if overlap > 0.0 {
                out.values[k].iter_mut().zip(row).for_each(|(o, r)| *o += overlap * r);
            }
        }
    }
    Ok(out)
}

/// Gaussian position blur (sigma = x_resolution / 2) followed by the velocity boxcar derived
/// from the chopper time.
pub fn convolve_resolution(pattern: &InterferencePattern, det: &DetectorConfig) -> Result<InterferencePattern> {
    det.validate()?;
    let sigma = 0.5 * det.x_resolution;
    let dx = pattern.spacing();
    let mut blurred = pattern.clone();
    blurred.values = pattern.values.par_iter().map(|r| gaussian_blur(r, dx, sigma)).collect();
    let mut out = velocity_boxcar(&blurred, |v| det.velocity_resolution(v))?;
    out.convolved = true;
    out.set_meta("x_resolution_m", det.x_resolution);
    out.set_meta("x_sigma_m", sigma);
    out.set_meta("time_resolution_s", det.time_resolution);
    out.set_meta("tof_distance_m", det.tof_distance);
    Ok(out)
}

/// Extrema below this fraction of the row peak are tail ripples, not fringes.
pub const CONTRAST_FLOOR: f64 = 1e-2;

/// Intensity-weighted peak-to-valley visibility sum |p_i - p_j| / sum (p_i + p_j) over adjacent
/// interior extrema of every row at or above `CONTRAST_FLOOR` of the row peak. A pattern without
/// such a pair has contrast 0.
pub fn fringe_contrast(pattern: &InterferencePattern) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for row in &pattern.values {
        let peak = row.iter().cloned().fold(0.0, f64::max);
        if peak <= 0.0 {
            continue;
        }
        let floor = CONTRAST_FLOOR * peak;
        let ext: Vec<f64> = row
            .windows(3)
            .filter(|w| (w[1] > w[0] && w[1] >= w[2]) || (w[1] < w[0] && w[1] <= w[2]))
            .map(|w| w[1])
            .filter(|&f| f >= floor)
            .collect();
        for p in ext.windows(2) {
            num += (p[0] - p[1]).abs();
            den += p[0] + p[1];
        }
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}
