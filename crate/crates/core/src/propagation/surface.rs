use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::HBAR;
use crate::error::{ensure, Result};
use crate::particle::ParticleSpec;
use crate::solver::{evolve_amplitudes, wall_slope, StateSet};

/// Inward probability current at the mirror for an absorbing wall psi(0) = -a psi'(0) with
/// Im(a) = -b: j = (hbar / m) b |psi'(0)|^2, times w = n(v) v.
///
/// `times` are measured from the region entrance; the particle decay and state widths enter
/// through the evolved amplitudes. A wall with b = 0 carries no current.
pub fn surface_current(
    set: &StateSet,
    c: &[Complex64],
    times: &[f64],
    particle: &ParticleSpec,
    b: f64,
    weight: f64,
) -> Result<Vec<f64>> {
    ensure(b >= 0.0 && b.is_finite(), || format!("absorbing length must be >= 0, got {b}"))?;
    ensure(set.grid.len() >= 5, || "grid too short for the wall derivative".into())?;
    if b == 0.0 {
        return Ok(vec![0.0; times.len()]);
    }
    let dx = set.grid.dx();
    let slopes: Vec<f64> = set.states.iter().map(|s| wall_slope(&s.psi, dx)).collect();
    let pref = weight * HBAR / set.mass * b;
    times
        .par_iter()
        .map(|&t| {
            let ct = evolve_amplitudes(set, c, t, particle)?;
            let slope: Complex64 = ct.iter().zip(&slopes).map(|(c, d)| c * d).sum();
            Ok(pref * slope.norm_sqr())
        })
        .collect()
}
