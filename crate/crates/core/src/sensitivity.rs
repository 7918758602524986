//! Fisher information of a simulated pattern with respect to an applied acceleration, and the
//! resulting Cramér-Rao bound.

use crate::constants::E_CHARGE;
use crate::error::{ensure, Error, Result};
use crate::propagation::InterferencePattern;

/// Points with P below this fraction of max(P) are left out of the Fisher integral.
pub const DENSITY_FLOOR: f64 = 1e-12;
/// Admissible relative change of P at the pattern peaks for a finite-difference step.
pub const STEP_WINDOW: (f64, f64) = (1e-4, 1e-1);
/// Relative change at the peaks aimed for when a step is suggested or chosen automatically.
pub const STEP_TARGET: f64 = 1e-2;
/// Points counted as "peaks" for the step check: P >= this fraction of max(P).
pub const PEAK_FRACTION: f64 = 0.5;
/// Allowed deviation of the normalized density from unit mass.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;
/// Carried with every reported bound.
pub const CAVEAT: &str = "lower bound on the spread of the estimate; reached only by an unbiased, efficient estimator";

/// Per-event Fisher information and the bookkeeping behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherReport {
    /// Fisher information per event, in 1 / (units of a)^2.
    pub information: f64,
    /// Probability mass of the points below the density floor.
    pub excluded_mass: f64,
    pub step: f64,
    /// Largest |dP| / P at the pattern peaks for the step used.
    pub peak_change: f64,
    /// dP/da on the pattern grid (normalized density per unit a).
    pub derivative: Vec<f64>,
    /// Normalized density at the nominal a.
    pub density: Vec<f64>,
}

/// Scales `values` to unit mass on cells of size `cell`.
pub fn normalize(values: &[f64], cell: f64) -> Result<Vec<f64>> {
    ensure(cell > 0.0 && cell.is_finite(), || format!("cell size must be positive, got {cell}"))?;
    ensure(values.iter().all(|v| v.is_finite() && *v >= 0.0), || "density must be finite and >= 0".into())?;
    let total: f64 = values.iter().sum::<f64>() * cell;
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Numerical(format!("cannot normalize a pattern of total mass {total:e}")));
    }
    let p: Vec<f64> = values.iter().map(|v| v / total).collect();
    let mass = p.iter().sum::<f64>() * cell;
    if (mass - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Numerical(format!("normalized mass {mass} differs from 1")));
    }
    Ok(p)
}

fn peak_change(p0: &[f64], dp: &[f64]) -> f64 {
    let max = p0.iter().cloned().fold(0.0, f64::max);
    p0.iter()
        .zip(dp)
        .filter(|(p, _)| **p >= PEAK_FRACTION * max)
        .map(|(p, d)| d.abs() / p)
        .fold(0.0, f64::max)
}

/// I = sum (dP/da)^2 / P * cell with dP/da by central difference at `step`.
///
/// `generator(a)` returns the unnormalized pattern on a fixed grid of cells of size `cell`;
/// every call is normalized independently.
pub fn fisher_information<F>(generator: F, a0: f64, step: f64, cell: f64) -> Result<FisherReport>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    ensure(step > 0.0 && step.is_finite(), || format!("finite-difference step must be positive, got {step}"))?;
    ensure(a0.is_finite(), || "nominal acceleration must be finite".into())?;
    let p0 = normalize(&generator(a0)?, cell)?;
    let pp = normalize(&generator(a0 + step)?, cell)?;
    let pm = normalize(&generator(a0 - step)?, cell)?;
    ensure(pp.len() == p0.len() && pm.len() == p0.len(), || "generator changed the grid size".into())?;

    let half_diff: Vec<f64> = pp.iter().zip(&pm).map(|(a, b)| 0.5 * (a - b)).collect();
    let change = peak_change(&p0, &half_diff);
    // an exactly unchanged density carries no information at any step
    let invariant = half_diff.iter().all(|d| *d == 0.0);
    if !invariant && !(STEP_WINDOW.0..=STEP_WINDOW.1).contains(&change) {
        let suggest = if change > 0.0 { step * STEP_TARGET / change } else { f64::NAN };
        return Err(Error::Validation(format!(
            "step {step:e} changes P by {change:.3e} at the peaks, outside [{:e}, {:e}]; try step = {suggest:.3e}",
            STEP_WINDOW.0, STEP_WINDOW.1
        )));
    }

    let max = p0.iter().cloned().fold(0.0, f64::max);
    let floor = DENSITY_FLOOR * max;
    let mut information = 0.0;
    let mut excluded = 0.0;
    let derivative: Vec<f64> = half_diff.iter().map(|d| d / step).collect();
    for (p, d) in p0.iter().zip(&derivative) {
        if *p < floor {
            excluded += p * cell;
        } else {
            information += d * d / p * cell;
        }
    }
    Ok(FisherReport { information, excluded_mass: excluded, step, peak_change: change, derivative, density: p0 })
}

/// Like [`fisher_information`] but rescales the step (up to six times) until the peak change
/// lands inside the admissible window.
pub fn fisher_information_auto<F>(generator: F, a0: f64, initial_step: f64, cell: f64) -> Result<FisherReport>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let mut step = initial_step;
    let mut last = None;
    for _ in 0..6 {
        match fisher_information(&generator, a0, step, cell) {
            Ok(r) => return Ok(r),
            Err(Error::Validation(msg)) => {
                let p0 = normalize(&generator(a0)?, cell)?;
                let pp = normalize(&generator(a0 + step)?, cell)?;
                let pm = normalize(&generator(a0 - step)?, cell)?;
                let d: Vec<f64> = pp.iter().zip(&pm).map(|(a, b)| 0.5 * (a - b)).collect();
                let change = peak_change(&p0, &d);
                if change == 0.0 || !change.is_finite() {
                    return Err(Error::Validation(msg));
                }
                step *= STEP_TARGET / change;
                last = Some(msg);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Validation(last.unwrap_or_else(|| "no admissible step found".into())))
}

/// sigma = 1 / sqrt(N I).
pub fn cramer_rao(information: f64, events: f64) -> Result<f64> {
    ensure(events >= 1.0 && events.is_finite(), || format!("event count must be >= 1, got {events}"))?;
    ensure(information > 0.0 && information.is_finite(), || {
        format!("Fisher information must be positive, got {information:e}")
    })?;
    Ok(1.0 / (events * information).sqrt())
}

/// Acceleration a = q E / m of a charge q (C) in a field E (V/m).
pub fn accel_from_charge(charge: f64, field: f64, mass: f64) -> Result<f64> {
    ensure(field > 0.0 && mass > 0.0, || "field and mass must be positive".into())?;
    Ok(charge * field / mass)
}

/// Charge bound in units of e from an acceleration bound.
pub fn charge_bound_e(sigma_accel: f64, field: f64, mass: f64) -> Result<f64> {
    ensure(field > 0.0 && mass > 0.0, || "field and mass must be positive".into())?;
    Ok(sigma_accel * mass / field / E_CHARGE)
}

/// Paired comparison of a baseline pattern and one with an extra acceleration.
#[derive(Debug, Clone)]
pub struct ShiftReport {
    /// Shifted minus baseline, both normalized to unit mass.
    pub difference: InterferencePattern,
    pub max_abs_difference: f64,
    /// Expected chi^2 per event, sum (P1 - P0)^2 / P0 * cell.
    pub chi2_per_event: f64,
    /// a_extra / sigma_a.
    pub significance: f64,
}

pub fn shift_experiment(
    baseline: &InterferencePattern,
    shifted: &InterferencePattern,
    a_extra: f64,
    sigma_accel: f64,
) -> Result<ShiftReport> {
    ensure(baseline.axis == shifted.axis && baseline.coords == shifted.coords && baseline.velocities == shifted.velocities, || {
        "baseline and shifted patterns are on different grids".into()
    })?;
    ensure(sigma_accel > 0.0, || "sigma must be positive".into())?;
    let cell = pattern_cell(baseline);
    let flat = |p: &InterferencePattern| p.values.iter().flatten().cloned().collect::<Vec<f64>>();
    let p0 = normalize(&flat(baseline), cell)?;
    let p1 = normalize(&flat(shifted), cell)?;
    let max = p0.iter().cloned().fold(0.0, f64::max);
    let floor = DENSITY_FLOOR * max;
    let diff: Vec<f64> = p1.iter().zip(&p0).map(|(a, b)| a - b).collect();
    let chi2 = diff.iter().zip(&p0).filter(|(_, p)| **p >= floor).map(|(d, p)| d * d / p * cell).sum();
    let nx = baseline.coords.len();
    let rows: Vec<Vec<f64>> = diff.chunks(nx).map(|c| c.to_vec()).collect();
    let mut difference = InterferencePattern {
        axis: baseline.axis,
        coords: baseline.coords.clone(),
        velocities: baseline.velocities.clone(),
        values: rows,
        convolved: baseline.convolved,
        metadata: baseline.metadata.clone(),
    };
    difference.set_meta("quantity", "normalized difference");
    Ok(ShiftReport {
        max_abs_difference: diff.iter().fold(0.0, |m, d| m.max(d.abs())),
        difference,
        chi2_per_event: chi2,
        significance: a_extra.abs() / sigma_accel,
    })
}

/// Cell area dx * dv of a pattern grid (dv = 1 for a single velocity).
pub fn pattern_cell(p: &InterferencePattern) -> f64 {
    let dv = if p.velocities.len() > 1 { p.velocities[1] - p.velocities[0] } else { 1.0 };
    p.spacing() * dv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_scales_with_events() {
        assert!((cramer_rao(1.0, 100.0).unwrap() - 0.1).abs() < 1e-15);
        let a = cramer_rao(3.0, 10.0).unwrap();
        let b = cramer_rao(3.0, 40.0).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
        assert!(cramer_rao(0.0, 10.0).is_err());
    }

    #[test]
    fn charge_round_trip() {
        let m = 1.67e-27;
        let a = accel_from_charge(1e-22 * E_CHARGE, 1e6, m).unwrap();
        assert!((charge_bound_e(a, 1e6, m).unwrap() - 1e-22).abs() < 1e-34);
    }
}
