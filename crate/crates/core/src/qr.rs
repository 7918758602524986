//! Quantum-reflection probability of a material surface.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;

use crate::constants::{E_CHARGE, HBAR};
use crate::error::{ensure, Error, Result};
use crate::numerics::brent;

/// Per-bounce reflection probability as a function of normal energy.
#[derive(Debug, Clone, PartialEq)]
pub enum QrModel {
    /// Perfect reflector, P = 1.
    HardWall,
    /// Threshold expansion with complex scattering length a (m), Im(a) <= 0.
    ScatteringLength { a: Complex64 },
    /// Digitized or generated curve.
    Tabulated(QrTable),
}

/// Reflection probability P(E) sampled at strictly increasing energies (eV).
#[derive(Debug, Clone, PartialEq)]
pub struct QrTable {
    pub energies_ev: Vec<f64>,
    pub probabilities: Vec<f64>,
    /// `# key = value` header lines.
    pub metadata: BTreeMap<String, String>,
    /// Clamp to the end values instead of refusing to extrapolate.
    pub clamp: bool,
}

impl QrTable {
    pub fn new(energies_ev: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        ensure(energies_ev.len() == probabilities.len(), || "energy and probability columns differ in length".into())?;
        ensure(energies_ev.len() >= 2, || "table needs at least two rows".into())?;
        for (i, w) in energies_ev.windows(2).enumerate() {
            ensure(w[1] > w[0], || format!("energies not strictly increasing at row {}", i + 2))?;
        }
        ensure(energies_ev[0] >= 0.0, || "energies must be non-negative".into())?;
        for (i, &p) in probabilities.iter().enumerate() {
            ensure(p > 0.0 && p <= 1.0, || format!("probability {p} at row {} outside (0, 1]", i + 1))?;
        }
        Ok(Self { energies_ev, probabilities, metadata: BTreeMap::new(), clamp: false })
    }

    /// Parses two whitespace-separated columns (E in eV, P) with `#` comments.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { path: origin.to_string(), line, msg };
        let mut e = Vec::new();
        let mut p = Vec::new();
        let mut meta = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once('=') {
                    meta.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(err(line_no, format!("expected 2 columns, found {}", cols.len())));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|_| err(line_no, format!("not a number: `{s}`")));
            let (ev, pv) = (parse(cols[0])?, parse(cols[1])?);
            if !(pv > 0.0 && pv <= 1.0) {
                return Err(err(line_no, format!("probability {pv} outside (0, 1]")));
            }
            if ev < 0.0 {
                return Err(err(line_no, format!("negative energy {ev}")));
            }
            if let Some(&prev) = e.last() {
                if ev <= prev {
                    return Err(err(line_no, format!("energy {ev} not above previous {prev}")));
                }
            }
            e.push(ev);
            p.push(pv);
        }
        if e.len() < 2 {
            return Err(err(text.lines().count(), "table needs at least two rows".into()));
        }
        let mut t = Self::new(e, p)?;
        t.metadata = meta;
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn range_ev(&self) -> (f64, f64) {
        (self.energies_ev[0], *self.energies_ev.last().unwrap())
    }

    /// Linear interpolation in (sqrt E, ln P).
    pub fn probability_ev(&self, e_ev: f64) -> Result<f64> {
        let (lo, hi) = self.range_ev();
        if e_ev < lo || e_ev > hi {
            if !self.clamp {
                return Err(Error::Extrapolation { energy_ev: e_ev, lo, hi });
            }
            return Ok(if e_ev < lo { self.probabilities[0] } else { *self.probabilities.last().unwrap() });
        }
        let i = match self.energies_ev.partition_point(|&x| x <= e_ev) {
            0 => 0,
            n if n >= self.energies_ev.len() => self.energies_ev.len() - 2,
            n => n - 1,
        };
        let (x0, x1) = (self.energies_ev[i].sqrt(), self.energies_ev[i + 1].sqrt());
        let (y0, y1) = (self.probabilities[i].ln(), self.probabilities[i + 1].ln());
        let t = (e_ev.sqrt() - x0) / (x1 - x0);
        Ok((y0 + t * (y1 - y0)).exp())
    }
}

fn wavenumber(e_perp: f64, mass: f64) -> f64 {
    (2.0 * mass * e_perp.max(0.0)).sqrt() / HBAR
}

/// |r|^2 with r = -(1 - i k a)/(1 + i k a). The expansion is used up to k|a| = 1, where
/// |r|^2 is minimal; beyond that the minimum is held so P stays non-increasing.
pub fn scattering_length_probability(a: Complex64, k: f64) -> f64 {
    let k = if a.norm() > 0.0 { k.min(1.0 / a.norm()) } else { k };
    let ika = Complex64::i() * k * a;
    let r = -(1.0 - ika) / (1.0 + ika);
    r.norm_sqr().min(1.0)
}

impl QrModel {
    pub fn scattering_length(a: Complex64) -> Result<Self> {
        ensure(a.im <= 0.0, || format!("scattering length must have Im(a) <= 0, got {a}"))?;
        ensure(a.re.is_finite() && a.im.is_finite(), || "scattering length must be finite".into())?;
        Ok(QrModel::ScatteringLength { a })
    }

    /// P(E_perp) for a particle of the given mass; E_perp in J.
    pub fn reflection_probability(&self, e_perp: f64, mass: f64) -> Result<f64> {
        ensure(e_perp >= 0.0 && e_perp.is_finite(), || format!("normal energy must be >= 0, got {e_perp}"))?;
        match self {
            QrModel::HardWall => Ok(1.0),
            QrModel::ScatteringLength { a } => Ok(scattering_length_probability(*a, wavenumber(e_perp, mass))),
            QrModel::Tabulated(t) => t.probability_ev(e_perp / E_CHARGE),
        }
    }

    /// Energy E_lim (J) at which P(E_lim)^beta = 1/2.
    pub fn effective_critical_energy(&self, mass: f64, beta: f64) -> Result<f64> {
        ensure(beta > 0.0 && beta.is_finite(), || format!("bounce count must be positive, got {beta}"))?;
        let target = 0.5f64.ln() / beta;
        let (lo, hi) = match self {
            QrModel::HardWall => {
                return Err(Error::Domain("a hard wall reflects every bounce; E_lim is undefined".into()))
            }
            QrModel::ScatteringLength { a } => {
                if a.im == 0.0 {
                    return Err(Error::Domain("real scattering length is lossless; E_lim is undefined".into()));
                }
                let k_max = 1.0 / a.norm();
                (0.0, (HBAR * k_max).powi(2) / (2.0 * mass))
            }
            QrModel::Tabulated(t) => {
                let (lo, hi) = t.range_ev();
                (lo * E_CHARGE, hi * E_CHARGE)
            }
        };
        // P reaches exactly 0 at k|a| = 1 for a purely absorptive scattering length
        let f = |e: f64| self.reflection_probability(e, mass).map(|p| p.max(f64::MIN_POSITIVE).ln() - target).unwrap_or(f64::NAN);
        if f(hi) > 0.0 {
            return Err(Error::NoBracket(format!(
                "reflection never drops to 0.5^(1/{beta}) within the model range"
            )));
        }
        brent(f, lo, hi, 1e-12)
    }

    /// Complex scattering length used for the absorbing wall condition. Tabulated curves give
    /// b = -ln P / (4 k) from the first non-zero energy (the threshold slope), with Re(a) = 0.
    pub fn effective_scattering_length(&self, mass: f64) -> Option<Complex64> {
        match self {
            QrModel::HardWall => None,
            QrModel::ScatteringLength { a } => Some(*a),
            QrModel::Tabulated(t) => {
                let i = t.energies_ev.iter().position(|&e| e > 0.0)?;
                let k = wavenumber(t.energies_ev[i] * E_CHARGE, mass);
                Some(Complex64::new(0.0, t.probabilities[i].ln() / (4.0 * k)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::M_HYDROGEN;

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = QrTable::parse("# c\n0 1\n1e-10 0.9\n5e-11 0.8\n", "t.dat").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
        let e = QrTable::parse("0 1\n1e-10 1.5\n", "t.dat").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = QrTable::parse("0 1 2\n", "t.dat").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn extrapolation_refused_unless_clamped() {
        let mut t = QrTable::parse("# material = test\n0 1\n1e-9 0.5\n", "t").unwrap();
        assert_eq!(t.metadata["material"], "test");
        assert!(matches!(t.probability_ev(2e-9), Err(Error::Extrapolation { .. })));
        t.clamp = true;
        assert_eq!(t.probability_ev(2e-9).unwrap(), 0.5);
    }

    #[test]
    fn interpolation_is_exact_for_exponential_in_root_energy() {
        let e: Vec<f64> = (0..20).map(|i| (i as f64 * 1e-6).powi(2)).collect();
        let p: Vec<f64> = e.iter().map(|x: &f64| (-3e4 * x.sqrt()).exp()).collect();
        let t = QrTable::new(e, p).unwrap();
        let x: f64 = 7.3e-6;
        assert!((t.probability_ev(x * x).unwrap() / (-3e4 * x).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hard_wall_has_no_critical_energy() {
        assert!(matches!(QrModel::HardWall.effective_critical_energy(M_HYDROGEN, 10.0), Err(Error::Domain(_))));
        assert!(QrModel::scattering_length(Complex64::new(0.0, 1e-9)).is_err());
    }

    #[test]
    fn small_k_limit() {
        let b = 2e-8;
        let a = Complex64::new(5e-9, -b);
        let k = 1e3;
        let p = scattering_length_probability(a, k);
        assert!((1.0 - p - 4.0 * k * b).abs() < 1e-3 * 4.0 * k * b);
    }
}
