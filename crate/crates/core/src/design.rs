//! Inverse design: from survival or transit requirements to mirror geometry.

use crate::constants::{G_STANDARD, HBAR};
use crate::error::{ensure, Result};
use crate::particle::ParticleSpec;
use crate::qr::QrModel;
use crate::scales::{acceleration_for_time, characteristic_scales};

/// Above this gamma no realistic absorber can select the lowest states.
pub const GAMMA_PRACTICAL_MAX: f64 = 30.0;
/// Absorber-to-mirror gaps above this are outside the usual slit hardware.
pub const DELTA_H_PRACTICAL_MAX: f64 = 1e-3;

/// Geometric constraint closing the design chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    /// Mirror length fixed; v = L / (beta tau), R = v^2 / a.
    Length(f64),
    /// Mirror radius fixed; v = sqrt(a R).
    Radius(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DesignMode {
    /// Choose the state energy as E_lim(beta) / gamma of the mirror material.
    Material { qr: QrModel, beta: f64, gamma: f64, constraint: Constraint, mirror_length: Option<f64> },
    /// Choose the state time as the transit time per bounce, tau = L / (beta v).
    Transit { length: f64, beta: f64, velocity: f64, gamma: f64 },
    /// Acceleration and speed given (decaying particle); mirror length spans `lifetimes` decay times.
    Acceleration { accel: f64, velocity: f64, lifetimes: f64, qr: Option<QrModel> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub particle: String,
    pub e_lim: Option<f64>,
    /// State energy scale E (J).
    pub energy: f64,
    pub tau: f64,
    pub accel: f64,
    pub velocity: f64,
    pub radius: Option<f64>,
    pub mirror_length: Option<f64>,
    pub char_length: f64,
    pub beta: f64,
    pub gamma: Option<f64>,
    pub delta_h: Option<f64>,
    pub g_over_a: f64,
    pub flags: Vec<String>,
}

impl DesignResult {
    /// (name, SI value, unit) rows for reports.
    pub fn rows(&self) -> Vec<(&'static str, f64, &'static str)> {
        let mut r = vec![
            ("energy", self.energy / crate::constants::E_CHARGE, "eV"),
            ("tau", self.tau, "s"),
            ("accel", self.accel, "m/s^2"),
            ("velocity", self.velocity, "m/s"),
            ("char_length", self.char_length, "m"),
            ("beta", self.beta, "1"),
            ("g_over_a", self.g_over_a, "1"),
        ];
        if let Some(e) = self.e_lim {
            r.insert(0, ("e_lim", e / crate::constants::E_CHARGE, "eV"));
        }
        let opt = [
            ("radius", self.radius, "m"),
            ("mirror_length", self.mirror_length, "m"),
            ("gamma", self.gamma, "1"),
            ("delta_h", self.delta_h, "m"),
        ];
        r.extend(opt.into_iter().filter_map(|(n, v, u)| v.map(|v| (n, v, u))));
        r
    }

    fn check_flags(&mut self) {
        if let Some(g) = self.gamma {
            if g > GAMMA_PRACTICAL_MAX {
                self.flags.push(format!("absorber_infeasible: gamma = {g:.3e} exceeds {GAMMA_PRACTICAL_MAX}"));
            }
        }
        if let Some(h) = self.delta_h {
            if h > DELTA_H_PRACTICAL_MAX {
                self.flags.push(format!("absorber_height_impractical: delta_h = {h:.3e} m"));
            }
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    ensure(v > 0.0 && v.is_finite(), || format!("{name} must be positive and finite, got {v}"))
}

pub fn design(particle: &ParticleSpec, mode: &DesignMode) -> Result<DesignResult> {
    particle.validate()?;
    let m = particle.mass_kg;
    let mut res = match mode {
        DesignMode::Material { qr, beta, gamma, constraint, mirror_length } => {
            positive("beta", *beta)?;
            positive("gamma", *gamma)?;
            let e_lim = qr.effective_critical_energy(m, *beta)?;
            let energy = e_lim / gamma;
            let tau = HBAR / energy;
            let accel = acceleration_for_time(m, tau)?;
            let l = energy / (m * accel);
            let (velocity, radius, length, beta_out) = match *constraint {
                Constraint::Length(len) => {
                    positive("mirror length", len)?;
                    let v = len / (beta * tau);
                    (v, v * v / accel, len, *beta)
                }
                Constraint::Radius(r) => {
                    positive("radius", r)?;
                    let v = (accel * r).sqrt();
                    let len = mirror_length.unwrap_or(beta * v * tau);
                    (v, r, len, len / (v * tau))
                }
            };
            DesignResult {
                particle: particle.name.clone(),
                e_lim: Some(e_lim),
                energy,
                tau,
                accel,
                velocity,
                radius: Some(radius),
                mirror_length: Some(length),
                char_length: l,
                beta: beta_out,
                gamma: Some(*gamma),
                delta_h: Some(gamma * l),
                g_over_a: G_STANDARD / accel,
                flags: Vec::new(),
            }
        }
        DesignMode::Transit { length, beta, velocity, gamma } => {
            positive("mirror length", *length)?;
            positive("beta", *beta)?;
            positive("velocity", *velocity)?;
            positive("gamma", *gamma)?;
            let tau = length / (beta * velocity);
            let accel = acceleration_for_time(m, tau)?;
            let energy = HBAR / tau;
            let l = energy / (m * accel);
            DesignResult {
                particle: particle.name.clone(),
                e_lim: None,
                energy,
                tau,
                accel,
                velocity: *velocity,
                radius: Some(velocity * velocity / accel),
                mirror_length: Some(*length),
                char_length: l,
                beta: *beta,
                gamma: Some(*gamma),
                delta_h: Some(gamma * l),
                g_over_a: G_STANDARD / accel,
                flags: Vec::new(),
            }
        }
        DesignMode::Acceleration { accel, velocity, lifetimes, qr } => {
            positive("acceleration", *accel)?;
            positive("velocity", *velocity)?;
            positive("lifetimes", *lifetimes)?;
            let life = particle.lifetime_s.ok_or_else(|| {
                crate::Error::Domain(format!("{} is stable; acceleration design needs a lifetime", particle.name))
            })?;
            let s = characteristic_scales(m, *accel)?;
            let beta = life / s.time;
            let (e_lim, gamma) = match qr {
                Some(q) => {
                    let e = q.effective_critical_energy(m, beta)?;
                    (Some(e), Some(e / s.energy))
                }
                None => (None, None),
            };
            DesignResult {
                particle: particle.name.clone(),
                e_lim,
                energy: s.energy,
                tau: s.time,
                accel: *accel,
                velocity: *velocity,
                radius: Some(velocity * velocity / accel),
                mirror_length: Some(velocity * lifetimes * life),
                char_length: s.length,
                beta,
                gamma,
                delta_h: gamma.map(|g| g * s.length),
                g_over_a: G_STANDARD / accel,
                flags: Vec::new(),
            }
        }
    };
    res.check_flags();
    Ok(res)
}

/// Storage-box bookkeeping for a reduced-gravity setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StorageInput {
    /// Mirror spacing across which the trajectories bounce (m).
    pub width: f64,
    /// Off-specular loss probability per wall collision.
    pub loss_per_bounce: f64,
    /// Wall collision rate (1/s).
    pub collision_rate: f64,
    /// Optional explicit cap on the observation time (s).
    pub observation_cap: Option<f64>,
}

impl Default for StorageInput {
    fn default() -> Self {
        Self { width: 1.0, loss_per_bounce: 2e-3, collision_rate: 5.0, observation_cap: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedGravityDesign {
    pub base: DesignResult,
    /// Mirror tilt angle, small-angle g_red / g (rad).
    pub tilt: f64,
    /// Vertical velocity scale sqrt(2E/m).
    pub v_perp: f64,
    /// Time after which off-specular losses reach 1/e.
    pub loss_time: f64,
    /// Time after which patterns of successive passes overlap.
    pub overlap_time: f64,
    pub t_obs: f64,
    pub trajectory_length: f64,
    pub pattern_size: f64,
}

impl ReducedGravityDesign {
    pub fn rows(&self) -> Vec<(&'static str, f64, &'static str)> {
        let mut r = self.base.rows();
        r.extend([
            ("tilt", self.tilt, "rad"),
            ("v_perp", self.v_perp, "m/s"),
            ("loss_time", self.loss_time, "s"),
            ("overlap_time", self.overlap_time, "s"),
            ("t_obs", self.t_obs, "s"),
            ("trajectory_length", self.trajectory_length, "m"),
            ("pattern_size", self.pattern_size, "m"),
        ]);
        r
    }
}

/// Per-pass accounting: pass k (k = 1..n, n = v t / W) carries a pattern of size
/// 2 v_perp k W / v. Passes are stacked across W, so they overlap once
/// v_perp W n (n + 1) / v > W.
pub fn overlap_time(width: f64, velocity: f64, v_perp: f64) -> f64 {
    let n = (-1.0 + (1.0 + 4.0 * velocity / v_perp).sqrt()) / 2.0;
    n * width / velocity
}

pub fn design_reduced_gravity(
    particle: &ParticleSpec,
    length: f64,
    beta: f64,
    velocity: f64,
    gamma: f64,
    storage: &StorageInput,
) -> Result<ReducedGravityDesign> {
    positive("storage width", storage.width)?;
    positive("collision rate", storage.collision_rate)?;
    ensure(storage.loss_per_bounce > 0.0 && storage.loss_per_bounce < 1.0, || {
        "loss per bounce must be in (0, 1)".into()
    })?;
    let base = design(particle, &DesignMode::Transit { length, beta, velocity, gamma })?;
    let v_perp = (2.0 * base.energy / particle.mass_kg).sqrt();
    let loss_time = 1.0 / (storage.loss_per_bounce * storage.collision_rate);
    let overlap = overlap_time(storage.width, velocity, v_perp);
    let mut t_obs = loss_time.min(overlap);
    if let Some(cap) = storage.observation_cap {
        positive("observation cap", cap)?;
        t_obs = t_obs.min(cap);
    }
    Ok(ReducedGravityDesign {
        tilt: base.accel / G_STANDARD,
        v_perp,
        loss_time,
        overlap_time: overlap,
        t_obs,
        trajectory_length: velocity * t_obs,
        pattern_size: 2.0 * v_perp * t_obs,
        base,
    })
}

/// Phase-space element of the states below gamma*E: 2 dY (gamma + 2) l sqrt(2 E gamma / m)
/// in m^2 m/s, and the collimation factor 2 sqrt(E gamma / m) / v / delta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpace {
    pub volume: f64,
    pub collimation: f64,
}

pub const DEFAULT_COLLIMATION_DELTA: f64 = 5.0;

pub fn phase_space_acceptance(
    beam_width: f64,
    gamma: f64,
    char_length: f64,
    energy: f64,
    mass: f64,
    velocity: f64,
    delta: f64,
) -> Result<PhaseSpace> {
    for (n, v) in [("beam width", beam_width), ("gamma", gamma), ("length", char_length), ("energy", energy), ("mass", mass), ("velocity", velocity), ("delta", delta)] {
        positive(n, v)?;
    }
    Ok(PhaseSpace {
        volume: 2.0 * beam_width * (gamma + 2.0) * char_length * (2.0 * energy * gamma / mass).sqrt(),
        collimation: 2.0 * (energy * gamma / mass).sqrt() / velocity / delta,
    })
}

impl PhaseSpace {
    /// Counted events for a source brightness (1 / (s m^2 (m/s))) over `duration` seconds.
    pub fn event_count(&self, brightness: f64, duration: f64, apply_collimation: bool) -> f64 {
        let c = if apply_collimation { self.collimation } else { 1.0 };
        brightness * self.volume * c * duration
    }
}
