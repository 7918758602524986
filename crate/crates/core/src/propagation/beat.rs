use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{ensure, Error, Result};

/// Poles z_k of a uniformly sampled signal y_n = sum_k A_k z_k^n, by the matrix-pencil method.
/// Singular values below `rel_tol` times the largest fix the model order.
pub fn matrix_pencil(samples: &[f64], rel_tol: f64) -> Result<Vec<Complex64>> {
    let n = samples.len();
    ensure(n >= 8, || "matrix pencil needs at least 8 samples".into())?;
    let l = n / 2;
    let rows = n - l;
    let y = DMatrix::from_fn(rows, l + 1, |i, j| samples[i + j]);
    let svd = y.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Numerical("SVD did not return right singular vectors".into()))?;
    let s_max = svd.singular_values.max();
    ensure(s_max > 0.0, || "signal is identically zero".into())?;
    let order = svd.singular_values.iter().filter(|&&s| s > rel_tol * s_max).count();
    // right singular vectors as columns: (l + 1) x order
    let v = v_t.rows(0, order).transpose();
    let v1 = v.rows(0, l).into_owned();
    let v2 = v.rows(1, l).into_owned();
    let pinv = v1.pseudo_inverse(1e-14).map_err(|e| Error::Numerical(e.to_string()))?;
    let a = pinv * v2;
    Ok(a.complex_eigenvalues().iter().copied().collect())
}

/// Oscillation periods (in units of the sample spacing `step`) present in a real signal,
/// ascending, from poles with positive frequency.
pub fn beat_periods(samples: &[f64], step: f64, rel_tol: f64) -> Result<Vec<f64>> {
    let poles = matrix_pencil(samples, rel_tol)?;
    let mut periods: Vec<f64> = poles
        .iter()
        .map(|z| z.arg())
        .filter(|&w| w > 1e-9)
        .map(|w| std::f64::consts::TAU * step / w)
        .collect();
    periods.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(periods)
}

/// Relative distance from `expected` to the closest entry of `found`.
pub fn closest_relative_error(found: &[f64], expected: f64) -> f64 {
    found.iter().map(|p| (p / expected - 1.0).abs()).fold(f64::INFINITY, f64::min)
}
