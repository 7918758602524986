use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{ensure, Error, Result};
use crate::solver::WavePacket;

/// Zero-padding factor applied before the FFT.
pub const FFT_PADDING: usize = 4;
/// Spectral support the k window must cover, in standard deviations of |psi~|^2.
pub const COVERAGE_SIGMAS: f64 = 6.0;
/// Allowed relative mismatch between the position- and momentum-space norms.
pub const PARSEVAL_TOLERANCE: f64 = 1e-8;

/// Transverse momentum distribution psi~(k) = (2 pi)^{-1/2} integral psi(x) exp(-i k x) dx.
///
/// The FFT samples on `k` serve the Parseval and coverage checks; `eval` computes psi~ at any k
/// by direct quadrature over the source packet.
#[derive(Debug, Clone)]
pub struct SpectralPacket {
    pub k: Vec<f64>,
    pub psi_k: Vec<Complex64>,
    /// Total wavenumber m v / hbar.
    pub k0: f64,
    source: WavePacket,
}

impl SpectralPacket {
    pub fn dk(&self) -> f64 {
        self.k[1] - self.k[0]
    }

    pub fn source(&self) -> &WavePacket {
        &self.source
    }

    /// Integral of |psi~|^2 over the sampled k window.
    pub fn norm(&self) -> f64 {
        self.psi_k.iter().map(|p| p.norm_sqr()).sum::<f64>() * self.dk()
    }

    /// Mean and standard deviation of k under |psi~|^2. The Nyquist bin is split evenly
    /// between +k and -k so that real packets have zero mean.
    pub fn moments(&self) -> (f64, f64) {
        let k_nyq = -self.k[0];
        let mut pts: Vec<(f64, f64)> = self.k.iter().zip(&self.psi_k).skip(1).map(|(k, p)| (*k, p.norm_sqr())).collect();
        let edge = self.psi_k[0].norm_sqr();
        pts.push((-k_nyq, 0.5 * edge));
        pts.push((k_nyq, 0.5 * edge));
        let w: f64 = pts.iter().map(|p| p.1).sum();
        let mean = pts.iter().map(|(k, p)| k * p).sum::<f64>() / w;
        let var = pts.iter().map(|(k, p)| (k - mean).powi(2) * p).sum::<f64>() / w;
        (mean, var.sqrt())
    }

    /// psi~(k) by trapezoidal quadrature on the source grid. This is the band-limited
    /// interpolant of the FFT samples, so integral |psi~|^2 dk over the Nyquist band equals
    /// dx sum |psi_i|^2 exactly. Simpson weights would alias a one-third replica of the
    /// spectrum to k +- pi / dx.
    pub fn eval(&self, k: f64) -> Complex64 {
        let grid = &self.source.grid;
        let step = Complex64::from_polar(1.0, -k * grid.dx());
        let mut phase = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        let last = self.source.psi.len() - 1;
        for (i, p) in self.source.psi.iter().enumerate() {
            if i % 256 == 0 {
                // resynchronize the recurrence to bound round-off drift
                phase = Complex64::from_polar(1.0, -k * grid.x(i));
            }
            let w = if i == 0 || i == last { 0.5 } else { 1.0 };
            acc += p * phase * w;
            phase *= step;
        }
        acc * grid.dx() / (2.0 * std::f64::consts::PI).sqrt()
    }

    /// RMS distance of the packet from the mirror plane.
    pub fn rms_extent(&self) -> f64 {
        let grid = &self.source.grid;
        let d: Vec<f64> = self.source.psi.iter().map(|p| p.norm_sqr()).collect();
        let x2: Vec<f64> = d.iter().zip(grid.xs()).map(|(d, x)| d * x * x).collect();
        (grid.integrate(&x2) / grid.integrate(&d)).sqrt()
    }

    /// Far-field length scale z0 = 2 k0 l0^2 with l0 the RMS extent.
    pub fn z0(&self) -> f64 {
        2.0 * self.k0 * self.rms_extent().powi(2)
    }
}

/// FFT of a packet with zero-padding. Fails when Parseval's identity or the 6-sigma coverage of
/// the k window is violated, which signals an under-resolved or truncated packet.
pub fn to_spectrum(packet: &WavePacket, k0: f64) -> Result<SpectralPacket> {
    ensure(k0 > 0.0 && k0.is_finite(), || format!("wavenumber must be positive, got {k0}"))?;
    let grid = &packet.grid;
    let norm_x = packet.norm();
    ensure(norm_x > 0.0, || "cannot transform an empty packet".into())?;
    let n = (FFT_PADDING * grid.len()).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..grid.len()].copy_from_slice(&packet.psi);
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let dx = grid.dx();
    let dk = std::f64::consts::TAU / (n as f64 * dx);
    let scale = dx / (2.0 * std::f64::consts::PI).sqrt();
    let half = n / 2;
    let mut k = Vec::with_capacity(n);
    let mut psi_k = Vec::with_capacity(n);
    for j in 0..n {
        // fftshift: negative frequencies first
        let src = (j + half) % n;
        let kj = (j as f64 - half as f64) * dk;
        k.push(kj);
        psi_k.push(buf[src] * scale);
    }
    let spec = SpectralPacket { k, psi_k, k0, source: packet.clone() };

    let norm_k = spec.norm();
    if (norm_k / norm_x - 1.0).abs() > PARSEVAL_TOLERANCE {
        return Err(Error::Numerical(format!(
            "Parseval check failed: |psi|^2 = {norm_x:.12e}, |psi~|^2 = {norm_k:.12e}; refine the height grid"
        )));
    }
    let (mean, sigma) = spec.moments();
    let k_edge = half as f64 * dk;
    if (mean.abs() + COVERAGE_SIGMAS * sigma) > k_edge {
        return Err(Error::Numerical(format!(
            "k window +-{k_edge:.3e} 1/m does not cover 6 sigma ({sigma:.3e} 1/m) around {mean:.3e}; refine the height grid"
        )));
    }
    Ok(spec)
}
