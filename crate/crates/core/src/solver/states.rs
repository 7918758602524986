use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::airy::{ai_zeros, airy, airy_scaled, modulus_phase, phase_difference, zeta};
use crate::constants::HBAR;
use crate::error::{ensure, Error, Result};
use crate::numerics::brent;
use crate::scales::{characteristic_scales, CharacteristicScales};

use super::grid::HeightGrid;

/// Confinement geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Walls {
    /// Mirror at x = 0 only.
    Single,
    /// Mirror at x = 0 and a second hard wall (absorber face) at x = delta_h.
    Two { delta_h: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiBoundState {
    /// 1-based quantum number.
    pub n: usize,
    /// Scaled energy lambda = E / (m a l).
    pub lambda: f64,
    /// Energy (J), including any wall shift.
    pub energy: f64,
    /// Decay width Gamma (J); amplitude decays as exp(-Gamma t / (2 hbar)).
    pub width: f64,
    /// Classical turning point E / (m a).
    pub turning_point: f64,
    /// False for states lying above the absorber that are dropped from evolution.
    pub populated: bool,
    /// Real eigenfunction on the grid, normalized with the grid quadrature.
    pub psi: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct StateSet {
    pub mass: f64,
    pub accel: f64,
    pub scales: CharacteristicScales,
    pub walls: Walls,
    pub grid: HeightGrid,
    pub states: Vec<QuasiBoundState>,
}

impl StateSet {
    pub fn populated(&self) -> impl Iterator<Item = (usize, &QuasiBoundState)> {
        self.states.iter().enumerate().filter(|(_, s)| s.populated)
    }
    pub fn n_populated(&self) -> usize {
        self.states.iter().filter(|s| s.populated).count()
    }
    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy).collect()
    }
}

fn check_inputs(mass: f64, accel: f64, n_max: usize) -> Result<CharacteristicScales> {
    ensure(n_max >= 1, || "need at least one state".into())?;
    characteristic_scales(mass, accel)
}

fn normalize(psi: &mut [f64], grid: &HeightGrid) -> Result<()> {
    let sq: Vec<f64> = psi.iter().map(|p| p * p).collect();
    let norm = grid.integrate(&sq).sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::Numerical("eigenfunction has zero norm on the grid".into()));
    }
    // positive slope at the mirror
    let sign = if psi.get(1).copied().unwrap_or(1.0) < 0.0 { -1.0 } else { 1.0 };
    psi.iter_mut().for_each(|p| *p *= sign / norm);
    Ok(())
}

/// Symmetric (Loewdin) orthonormalization with the grid quadrature, so that sampled states are
/// orthonormal to round-off rather than to quadrature accuracy. Moves each state by O(dx^4).
fn orthonormalize(states: &mut [QuasiBoundState], grid: &HeightGrid) -> Result<()> {
    let n = states.len();
    let w = grid.weights();
    let overlap = DMatrix::from_fn(n, n, |i, j| {
        states[i].psi.iter().zip(&states[j].psi).zip(w).map(|((a, b), w)| a * b * w).sum::<f64>()
    });
    let eig = overlap.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&e| !(e > 1e-6)) {
        return Err(Error::Numerical("sampled states are nearly linearly dependent; refine the grid".into()));
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| 1.0 / e.sqrt()));
    let s_inv_half = &eig.eigenvectors * d * eig.eigenvectors.transpose();
    let old: Vec<Vec<f64>> = states.iter().map(|s| s.psi.clone()).collect();
    for (i, st) in states.iter_mut().enumerate() {
        for (k, p) in st.psi.iter_mut().enumerate() {
            *p = (0..n).map(|j| s_inv_half[(i, j)] * old[j][k]).sum();
        }
    }
    Ok(())
}

/// Hard-wall Airy states psi_n(x) = Ai(x / l - lambda_n) with E_n = E_c lambda_n.
pub fn solve_single_wall(mass: f64, accel: f64, n_max: usize, grid: &HeightGrid) -> Result<StateSet> {
    let scales = check_inputs(mass, accel, n_max)?;
    let l = scales.length;
    let zeros = ai_zeros(n_max);
    grid.check_resolves(l, zeros[n_max - 1])?;
    let states = zeros
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let mut psi: Vec<f64> = grid.xs().map(|x| airy(x / l - lambda).ai).collect();
            psi[0] = 0.0;
            normalize(&mut psi, grid)?;
            Ok(QuasiBoundState {
                n: i + 1,
                lambda,
                energy: lambda * scales.energy,
                width: 0.0,
                turning_point: lambda * l,
                populated: true,
                psi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut states = states;
    orthonormalize(&mut states, grid)?;
    Ok(StateSet { mass, accel, scales, walls: Walls::Single, grid: grid.clone(), states })
}

/// Quantization function for walls at scaled heights 0 and h: a positive multiple of
/// Ai(-lambda) Bi(h - lambda) - Ai(h - lambda) Bi(-lambda).
fn two_wall_determinant(lambda: f64, h: f64) -> f64 {
    let t2 = lambda - h;
    if lambda >= 8.0 && t2 >= 8.0 {
        let (m1, _) = modulus_phase(lambda);
        let (m2, _) = modulus_phase(t2);
        return -m1 * m2 * phase_difference(lambda, t2).sin();
    }
    let a1 = airy(-lambda);
    let a2 = airy_scaled(h - lambda);
    let z2 = zeta(h - lambda);
    a1.ai * a2.bi - a2.ai * (-2.0 * z2).exp() * a1.bi
}

/// Same combination evaluated at scaled position xi = x/l - lambda, scaled by exp(-zeta(h - lambda)).
fn two_wall_function(xi: f64, lambda: f64, h: f64) -> f64 {
    let t = -xi;
    let t2 = lambda - h;
    if t >= 8.0 && t2 >= 8.0 {
        let (m, _) = modulus_phase(t);
        let (m2, _) = modulus_phase(t2);
        return -m * m2 * phase_difference(t, t2).sin();
    }
    let a = airy_scaled(xi);
    let a2 = airy_scaled(h - lambda);
    let (z, z2) = (zeta(xi), zeta(h - lambda));
    let ai_xi = if z > 0.0 { a.ai * (-z).exp() } else { a.ai };
    ai_xi * a2.bi - a2.ai * a.bi * (z - 2.0 * z2).exp()
}

/// First `n` roots of the two-wall quantization condition in scaled units.
pub(crate) fn two_wall_lambdas(h: f64, n: usize) -> Result<Vec<f64>> {
    ensure(h > 0.0 && h.is_finite(), || format!("wall separation must be positive, got {h}"))?;
    let f = |lam: f64| two_wall_determinant(lam, h);
    let mut roots = Vec::with_capacity(n);
    let mut lo = 1e-9;
    let mut f_lo = f(lo);
    let mut guard = 0usize;
    while roots.len() < n {
        // the WKB phase grows no faster than dphi/dlambda, so this step cannot skip a root pair
        let dphi = if lo <= h { lo.sqrt() } else { lo.sqrt() - (lo - h).sqrt() };
        let step = (0.25 * std::f64::consts::PI / dphi).min(0.5f64.max(0.05 * lo));
        let hi = lo + step;
        let f_hi = f(hi);
        if f_lo == 0.0 {
            roots.push(lo);
        } else if f_lo.signum() != f_hi.signum() {
            roots.push(brent(f, lo, hi, 1e-15)?);
        }
        lo = hi;
        f_lo = f_hi;
        guard += 1;
        if guard > 50_000_000 {
            return Err(Error::Numerical("two-wall root scan did not terminate".into()));
        }
    }
    Ok(roots)
}

/// States between hard walls at 0 and delta_h. States whose turning point lies at or above
/// delta_h are returned with `populated = false`.
pub fn solve_two_wall(mass: f64, accel: f64, delta_h: f64, n_max: usize, grid: &HeightGrid) -> Result<StateSet> {
    let scales = check_inputs(mass, accel, n_max)?;
    ensure(delta_h > 0.0, || format!("absorber height must be positive, got {delta_h}"))?;
    let l = scales.length;
    let h = delta_h / l;
    let idx = delta_h / grid.dx();
    ensure((idx - idx.round()).abs() < 1e-6 && grid.x_max() >= delta_h * (1.0 - 1e-12), || {
        format!("absorber height {delta_h:e} m is not a grid node")
    })?;
    let i_h = idx.round() as usize;
    let lambdas = two_wall_lambdas(h, n_max)?;
    let lam_max = lambdas[n_max - 1];
    let wavelength = std::f64::consts::TAU * l / lam_max.sqrt();
    ensure(grid.dx() <= wavelength / super::grid::POINTS_PER_WAVELENGTH, || {
        format!("grid spacing {:.3e} m too coarse for state {n_max}", grid.dx())
    })?;
    let states = lambdas
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let mut psi: Vec<f64> = grid
                .xs()
                .enumerate()
                .map(|(j, x)| if j == 0 || j >= i_h { 0.0 } else { two_wall_function(x / l - lambda, lambda, h) })
                .collect();
            normalize(&mut psi, grid)?;
            Ok(QuasiBoundState {
                n: i + 1,
                lambda,
                energy: lambda * scales.energy,
                width: 0.0,
                turning_point: lambda * l,
                populated: lambda < h,
                psi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut states = states;
    orthonormalize(&mut states, grid)?;
    Ok(StateSet { mass, accel, scales, walls: Walls::Two { delta_h }, grid: grid.clone(), states })
}

/// Classical bounce angular frequency pi m a / sqrt(2 m E).
pub fn bounce_frequency(mass: f64, accel: f64, energy: f64) -> f64 {
    std::f64::consts::PI * mass * accel / (2.0 * mass * energy).sqrt()
}

/// WKB barrier factor exp(-(4/3) sqrt(2m) (m a dH - E)^{3/2} / (hbar m a)).
pub fn wkb_barrier(mass: f64, accel: f64, energy: f64, delta_h: f64) -> f64 {
    let gap = mass * accel * delta_h - energy;
    if gap <= 0.0 {
        return 1.0;
    }
    (-(4.0 / 3.0) * (2.0 * mass).sqrt() * gap.powf(1.5) / (HBAR * mass * accel)).exp()
}

/// Adds absorber widths Gamma_n = hbar omega_n P_n for an absorber at delta_h. States with
/// turning point at or above delta_h are marked unpopulated.
pub fn absorber_widths(set: &mut StateSet, delta_h: f64) -> Result<()> {
    ensure(delta_h > 0.0, || format!("absorber height must be positive, got {delta_h}"))?;
    let (m, a) = (set.mass, set.accel);
    for s in &mut set.states {
        if s.turning_point >= delta_h {
            s.populated = false;
        }
        s.width += HBAR * bounce_frequency(m, a, s.energy) * wkb_barrier(m, a, s.energy, delta_h);
    }
    Ok(())
}

/// psi'(0) by the one-sided fourth-order difference (-25, 48, -36, 16, -3) / 12.
pub fn wall_slope(psi: &[f64], dx: f64) -> f64 {
    (-25.0 * psi[0] + 48.0 * psi[1] - 36.0 * psi[2] + 16.0 * psi[3] - 3.0 * psi[4]) / (12.0 * dx)
}

/// Applies the wall condition psi(0) = -a psi'(0) to first order in a:
/// E_n - i Gamma_n / 2 shifts by (hbar^2 / 2m) a |psi_n'(0)|^2. For a single wall
/// |psi_n'(0)|^2 = 1 / l^3 and the shift is m acc a for every n.
pub fn apply_wall_scattering_length(set: &mut StateSet, a: Complex64) -> Result<()> {
    ensure(a.im <= 0.0, || format!("scattering length needs Im(a) <= 0, got {a}"))?;
    ensure(set.grid.len() >= 5, || "grid too short for the wall derivative".into())?;
    let dx = set.grid.dx();
    let c = HBAR * HBAR / (2.0 * set.mass);
    for s in &mut set.states {
        let d2 = wall_slope(&s.psi, dx).powi(2);
        s.energy += c * a.re * d2;
        s.width += 2.0 * c * (-a.im) * d2;
    }
    Ok(())
}
