use num_complex::Complex64;

use crate::constants::HBAR;
use crate::error::{ensure, Error, Result};
use crate::particle::ParticleSpec;

use super::grid::HeightGrid;
use super::states::StateSet;

/// Transverse wavefunction sampled on a height grid.
#[derive(Debug, Clone)]
pub struct WavePacket {
    pub grid: HeightGrid,
    pub psi: Vec<Complex64>,
}

impl WavePacket {
    pub fn new(grid: HeightGrid, psi: Vec<Complex64>) -> Result<Self> {
        ensure(psi.len() == grid.len(), || "wavefunction and grid lengths differ".into())?;
        Ok(Self { grid, psi })
    }

    /// Uniform amplitude 1/sqrt(delta_h) over [0, delta_h]: a collimated beam entering a slit.
    pub fn plane_wave(grid: &HeightGrid, delta_h: f64) -> Result<Self> {
        ensure(delta_h > 0.0 && delta_h <= grid.x_max() * (1.0 + 1e-12), || {
            format!("slit height {delta_h:e} m outside grid")
        })?;
        let amp = 1.0 / delta_h.sqrt();
        let i_h = grid.index_of(delta_h);
        let psi = (0..grid.len()).map(|i| Complex64::new(if i <= i_h { amp } else { 0.0 }, 0.0)).collect();
        Ok(Self { grid: grid.clone(), psi })
    }

    /// Normalized Gaussian exp(-(x - x0)^2 / (4 sigma^2) + i k x).
    pub fn gaussian(grid: &HeightGrid, x0: f64, sigma: f64, k: f64) -> Result<Self> {
        ensure(sigma > 0.0, || "Gaussian width must be positive".into())?;
        let mut psi: Vec<Complex64> = grid
            .xs()
            .map(|x| Complex64::from_polar((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), k * x))
            .collect();
        let n = (WavePacket { grid: grid.clone(), psi: psi.clone() }).norm().sqrt();
        psi.iter_mut().for_each(|p| *p /= n);
        Ok(Self { grid: grid.clone(), psi })
    }

    pub fn norm(&self) -> f64 {
        let d: Vec<f64> = self.psi.iter().map(|p| p.norm_sqr()).collect();
        self.grid.integrate(&d)
    }

    /// Zero-pads to a longer grid with the same spacing.
    pub fn padded(&self, grid: &HeightGrid) -> Result<Self> {
        ensure((grid.dx() / self.grid.dx() - 1.0).abs() < 1e-12, || "grids have different spacing".into())?;
        ensure(grid.len() >= self.grid.len() || self.psi[grid.len()..].iter().all(|p| p.norm() == 0.0), || {
            "target grid truncates the wavefunction".into()
        })?;
        let mut psi = vec![Complex64::new(0.0, 0.0); grid.len()];
        let n = grid.len().min(self.psi.len());
        psi[..n].copy_from_slice(&self.psi[..n]);
        Ok(Self { grid: grid.clone(), psi })
    }
}

/// Expansion coefficients c_i = integral psi psi_i dx (no complex conjugation), for every state
/// in the set.
pub fn project(packet: &WavePacket, set: &StateSet) -> Result<Vec<Complex64>> {
    let packet = if packet.grid == set.grid { packet.clone() } else { packet.padded(&set.grid)? };
    let w = set.grid.weights();
    Ok(set
        .states
        .iter()
        .map(|s| packet.psi.iter().zip(&s.psi).zip(w).map(|((p, q), w)| p * (q * w)).sum())
        .collect())
}

/// Time-evolved amplitudes c_i exp(-i E_i t / hbar - Gamma_i t / (2 hbar)), times the free-decay
/// factor exp(-t / (2 tau)). Unpopulated states are set to zero.
pub fn evolve_amplitudes(set: &StateSet, c: &[Complex64], t: f64, particle: &ParticleSpec) -> Result<Vec<Complex64>> {
    ensure(c.len() == set.states.len(), || "amplitude count does not match the basis".into())?;
    ensure(t >= 0.0 && t.is_finite(), || format!("evolution time must be >= 0, got {t}"))?;
    let decay = particle.survival(t).sqrt();
    Ok(set
        .states
        .iter()
        .zip(c)
        .map(|(s, ci)| {
            if !s.populated {
                return Complex64::new(0.0, 0.0);
            }
            let phase = Complex64::new(-s.width * t / (2.0 * HBAR), -s.energy * t / HBAR).exp();
            ci * phase * decay
        })
        .collect())
}

/// Wavefunction sum_i c_i psi_i(x).
pub fn synthesize(set: &StateSet, c: &[Complex64]) -> Result<WavePacket> {
    ensure(c.len() == set.states.len(), || "amplitude count does not match the basis".into())?;
    let mut psi = vec![Complex64::new(0.0, 0.0); set.grid.len()];
    for (s, ci) in set.states.iter().zip(c) {
        if ci.norm() == 0.0 {
            continue;
        }
        for (p, q) in psi.iter_mut().zip(&s.psi) {
            *p += ci * q;
        }
    }
    WavePacket::new(set.grid.clone(), psi)
}

pub fn evolve(set: &StateSet, c: &[Complex64], t: f64, particle: &ParticleSpec) -> Result<WavePacket> {
    synthesize(set, &evolve_amplitudes(set, c, t, particle)?)
}

/// Result of re-expanding a packet in a new basis at a region boundary.
#[derive(Debug, Clone)]
pub struct Transition {
    pub amplitudes: Vec<Complex64>,
    /// Norm carried by the new basis.
    pub captured: f64,
    /// Norm of the incoming packet.
    pub incoming: f64,
}

/// Sudden approximation: the packet is unchanged across the boundary and is projected onto the
/// downstream eigenbasis.
pub fn sudden_transition(packet: &WavePacket, next: &StateSet) -> Result<Transition> {
    let amplitudes = project(packet, next)?;
    let captured = amplitudes.iter().map(|c| c.norm_sqr()).sum();
    let incoming = packet.norm();
    if !(captured <= incoming * (1.0 + 1e-6) + 1e-12) {
        return Err(Error::Numerical(format!(
            "basis captures more norm ({captured}) than the packet carries ({incoming}); grid too coarse"
        )));
    }
    Ok(Transition { amplitudes, captured, incoming })
}
