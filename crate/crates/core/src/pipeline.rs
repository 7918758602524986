//! Scene execution: plane wave -> absorber region -> free mirror region -> detector or surface.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::airy::ai_zeros;
use crate::constants::HBAR;
use crate::design::{phase_space_acceptance, DEFAULT_COLLIMATION_DELTA};
use crate::error::{Error, Result};
use crate::particle::{Catalog, ParticleSpec};
use crate::propagation::{
    convolve_resolution, far_field_flux, far_field_regime, surface_current, to_spectrum, Axis, DetectorConfig,
    FarFieldRegime, InterferencePattern,
};
use crate::scales::characteristic_scales;
use crate::scenario::{Scenario, SensitivityParameter, Variant};
use crate::sensitivity::{
    charge_bound_e, cramer_rao, fisher_information, fisher_information_auto, pattern_cell, shift_experiment,
    FisherReport, ShiftReport, CAVEAT,
};
use crate::solver::{
    absorber_widths, apply_wall_scattering_length, evolve, project, solve_single_wall, solve_two_wall,
    sudden_transition, HeightGrid, StateSet, WavePacket,
};

/// Scaled energy headroom of the free-region basis above the absorber height.
const FREE_BASIS_HEADROOM: f64 = 10.0;
/// Growth factor of the free-region energy cut when the capture target is missed.
const FREE_BASIS_GROWTH: f64 = 1.6;
const FREE_BASIS_ATTEMPTS: usize = 6;

/// Eigenbases of the two mirror regions for one normal acceleration.
#[derive(Debug, Clone)]
pub struct Regions {
    pub accel: f64,
    /// Two-wall basis with absorber widths, over [0, L_A].
    pub absorber: StateSet,
    /// Single-wall basis over [L_A, L]; absent when the absorber covers the mirror.
    pub free: Option<StateSet>,
    /// Smallest fraction of a populated absorber state captured by the free basis.
    pub capture: f64,
}

fn count_below(lambda: f64) -> usize {
    let mut n = 1;
    loop {
        let z = ai_zeros(n + 16);
        if let Some(i) = z.iter().position(|&x| x >= lambda) {
            return i;
        }
        n += 16;
    }
}

/// Builds both bases on a shared grid. The free basis is enlarged until every populated
/// absorber state keeps at least `capture_target` of its norm across the boundary.
pub fn build_regions(
    mass: f64,
    accel: f64,
    delta_h: f64,
    wall: Option<Complex64>,
    with_free: bool,
    oversample: f64,
    capture_target: f64,
) -> Result<Regions> {
    let scales = characteristic_scales(mass, accel)?;
    let l = scales.length;
    let h = delta_h / l;
    let n_two = count_below(h) + 1;
    let mut lambda_free = h + FREE_BASIS_HEADROOM;
    for _ in 0..FREE_BASIS_ATTEMPTS {
        let n_free = count_below(lambda_free).max(1);
        let lambda_top = if with_free { ai_zeros(n_free)[n_free - 1] } else { h + 2.0 };
        let grid = HeightGrid::for_states(l, lambda_top.max(h + 2.0), delta_h, Some(delta_h), oversample)?;
        let mut absorber = solve_two_wall(mass, accel, delta_h, n_two, &grid)?;
        absorber_widths(&mut absorber, delta_h)?;
        if let Some(a) = wall {
            apply_wall_scattering_length(&mut absorber, a)?;
        }
        if !with_free {
            return Ok(Regions { accel, absorber, free: None, capture: 1.0 });
        }
        let mut free = solve_single_wall(mass, accel, n_free, &grid)?;
        if let Some(a) = wall {
            apply_wall_scattering_length(&mut free, a)?;
        }
        let capture = absorber
            .populated()
            .map(|(_, s)| {
                let p = WavePacket::new(grid.clone(), s.psi.iter().map(|&x| Complex64::new(x, 0.0)).collect())?;
                Ok(project(&p, &free)?.iter().map(|c| c.norm_sqr()).sum::<f64>())
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(1.0, f64::min);
        if capture >= capture_target {
            return Ok(Regions { accel, absorber, free: Some(free), capture });
        }
        lambda_free = h + (lambda_free - h) * FREE_BASIS_GROWTH;
    }
    Err(Error::Numerical(format!(
        "free-region basis still captures less than {capture_target} of the absorber states at lambda = {lambda_free:.1}"
    )))
}

/// Propagation of one velocity through the mirror.
#[derive(Debug, Clone)]
pub struct VelocitySlice {
    pub velocity: f64,
    pub weight: f64,
    pub mass: f64,
    pub accel: f64,
    pub n_populated: usize,
    /// Norm entering the absorber region (plane wave restricted to the populated states).
    pub entrance_norm: f64,
    /// Norm carried across the region boundary, and the norm arriving there.
    pub captured: f64,
    pub incoming: f64,
    pub capture: f64,
    /// Packet at the mirror exit.
    pub exit: WavePacket,
    /// Free-region basis and amplitudes at its entrance.
    pub free: Option<(StateSet, Vec<Complex64>)>,
}

fn propagate(scn: &Scenario, particle: &ParticleSpec, regions: &Regions, v: f64, weight: f64, dh: f64) -> Result<VelocitySlice> {
    let grid = regions.absorber.grid.clone();
    let mut input = WavePacket::plane_wave(&grid, dh)?;
    let k = scn.beam.k_perp_per_m;
    if k != 0.0 {
        for (p, x) in input.psi.iter_mut().zip(grid.xs()) {
            *p *= Complex64::from_polar(1.0, k * x);
        }
    }
    let c = project(&input, &regions.absorber)?;
    let entrance_norm = regions.absorber.populated().map(|(i, _)| c[i].norm_sqr()).sum();
    let t_abs = scn.absorber.length_m / v;
    let after = evolve(&regions.absorber, &c, t_abs, particle)?;
    let (exit, free, captured, incoming) = match &regions.free {
        None => {
            let n = after.norm();
            (after, None, n, n)
        }
        Some(set) => {
            let tr = sudden_transition(&after, set)?;
            let t_free = (scn.mirror.length_m - scn.absorber.length_m) / v;
            let exit = evolve(set, &tr.amplitudes, t_free, particle)?;
            (exit, Some((set.clone(), tr.amplitudes)), tr.captured, tr.incoming)
        }
    };
    Ok(VelocitySlice {
        velocity: v,
        weight,
        mass: particle.mass_kg,
        accel: regions.accel,
        n_populated: regions.absorber.n_populated(),
        entrance_norm,
        captured,
        incoming,
        capture: regions.capture,
        exit,
        free,
    })
}

/// Propagates every beam velocity for one variant. Bases are shared between velocities with
/// the same normal acceleration (flat mirrors).
pub fn run_slices(scn: &Scenario, catalog: &Catalog, variant: &Variant) -> Result<Vec<VelocitySlice>> {
    let particle = catalog.get(&scn.particle)?;
    let vs = scn.velocities()?;
    let ws = scn.weights(&vs)?;
    let wall = scn.wall_model()?.effective_scattering_length(particle.mass_kg);
    let with_free = scn.absorber.length_m < scn.mirror.length_m;
    let accels: Vec<f64> = vs.iter().map(|&v| scn.mirror_accel(v)).collect();
    let mut unique: Vec<f64> = Vec::new();
    for &a in &accels {
        if !unique.iter().any(|u| u.to_bits() == a.to_bits()) {
            unique.push(a);
        }
    }
    let regions: Vec<Regions> = unique
        .par_iter()
        .map(|&a| {
            build_regions(
                particle.mass_kg,
                a,
                variant.absorber_height,
                wall,
                with_free,
                scn.solver.oversample,
                scn.solver.capture_target,
            )
        })
        .collect::<Result<_>>()?;
    vs.par_iter()
        .zip(&ws)
        .zip(&accels)
        .map(|((&v, &w), &a)| {
            let r = regions.iter().find(|r| r.accel.to_bits() == a.to_bits()).expect("basis built for every acceleration");
            propagate(scn, particle, r, v, w, variant.absorber_height)
        })
        .collect()
}

/// Detector configuration of a variant.
pub fn detector_config(scn: &Scenario, variant: &Variant) -> Result<DetectorConfig> {
    let d = scn.detector.as_ref().ok_or_else(|| Error::Validation("detector: missing".into()))?;
    let fall = d.fall_mps2.unwrap_or_else(|| scn.mirror_gravity()) + variant.extra_accel;
    let det = DetectorConfig {
        distance: d.distance_m,
        fall_accel: fall,
        x_resolution: d.x_resolution_m,
        time_resolution: d.time_resolution_s,
        tof_distance: d.tof_distance_m.unwrap_or(d.distance_m),
    };
    det.validate()?;
    Ok(det)
}

fn detector_xs(scn: &Scenario) -> Vec<f64> {
    let d = scn.detector.as_ref().expect("validated");
    let [lo, hi] = d.x_range_m;
    let n = d.x_points;
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Unconvolved detector flux of every slice, and the smallest z/z0 met.
pub fn detector_pattern(scn: &Scenario, variant: &Variant, slices: &[VelocitySlice]) -> Result<(InterferencePattern, f64)> {
    let det = detector_config(scn, variant)?;
    let force = scn.detector.as_ref().is_some_and(|d| d.force_far_field);
    let xs = detector_xs(scn);
    let rows: Vec<(Vec<f64>, f64)> = slices
        .par_iter()
        .map(|s| {
            let k0 = s.mass * s.velocity / HBAR;
            let spec = to_spectrum(&s.exit, k0)?;
            far_field_flux(&spec, &det, s.velocity, &xs, s.weight, force)
        })
        .collect::<Result<_>>()?;
    let ratio = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let mut p = InterferencePattern::new(
        Axis::X,
        xs,
        slices.iter().map(|s| s.velocity).collect(),
        rows.into_iter().map(|r| r.0).collect(),
    )?;
    p.set_meta("detector_distance_m", det.distance);
    p.set_meta("fall_accel_mps2", det.fall_accel);
    p.set_meta("z_over_z0_min", format!("{ratio:.4e}"));
    let regime = match far_field_regime(ratio) {
        FarFieldRegime::Converged => "converged",
        FarFieldRegime::Marginal => "marginal",
        FarFieldRegime::Invalid => "forced",
    };
    p.set_meta("far_field", regime);
    Ok((p, ratio))
}

/// Surface current on the free mirror region, one row per velocity, z measured from the
/// mirror entrance.
pub fn surface_pattern(scn: &Scenario, particle: &ParticleSpec, slices: &[VelocitySlice]) -> Result<InterferencePattern> {
    let wall = scn.wall_model()?.effective_scattering_length(particle.mass_kg);
    let b = wall.map_or(0.0, |a| -a.im);
    let (z0, z1) = (scn.absorber.length_m, scn.mirror.length_m);
    let n = scn.outputs.z_points;
    let zs: Vec<f64> = (0..n).map(|i| z0 + (z1 - z0) * i as f64 / (n - 1) as f64).collect();
    let rows = slices
        .iter()
        .map(|s| {
            let (set, c) = s.free.as_ref().ok_or_else(|| Error::Validation("surface current needs a free region".into()))?;
            let times: Vec<f64> = zs.iter().map(|z| (z - z0) / s.velocity).collect();
            surface_current(set, c, &times, particle, b, s.weight)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut p = InterferencePattern::new(Axis::Z, zs, slices.iter().map(|s| s.velocity).collect(), rows)?;
    p.set_meta("absorbing_length_m", b);
    Ok(p)
}

/// Spectrum-weighted sum over velocities, as a single row at the weighted mean velocity.
pub fn integrate_velocities(p: &InterferencePattern, weights: &[f64]) -> Result<InterferencePattern> {
    let dv = if p.velocities.len() > 1 { p.velocities[1] - p.velocities[0] } else { 1.0 };
    let mut row = vec![0.0; p.coords.len()];
    for r in &p.values {
        for (acc, f) in row.iter_mut().zip(r) {
            *acc += f * dv;
        }
    }
    let wsum: f64 = weights.iter().sum();
    let mean = p.velocities.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / wsum;
    let mut out = InterferencePattern::new(p.axis, p.coords.clone(), vec![mean], vec![row])?;
    out.metadata = p.metadata.clone();
    out.set_meta("integrated_over_velocity", "true");
    Ok(out)
}

/// A pattern with the file stem it is written under.
#[derive(Debug, Clone)]
pub struct NamedPattern {
    pub stem: String,
    pub pattern: InterferencePattern,
}

/// Everything a scene run produces.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub hash: String,
    pub patterns: Vec<NamedPattern>,
    /// Flat key=value summary, ordered.
    pub summary: BTreeMap<String, String>,
}

fn stem(scn: &Scenario, variant: &Variant, suffix: &str) -> String {
    let mut s = scn.name.clone();
    if !variant.label.is_empty() {
        s.push('-');
        s.push_str(&variant.label);
    }
    if !suffix.is_empty() {
        s.push('-');
        s.push_str(suffix);
    }
    s
}

fn annotate(p: &mut InterferencePattern, scn: &Scenario, hash: &str, variant: &Variant, slices: &[VelocitySlice]) {
    p.set_meta("scene", &scn.name);
    p.set_meta("scene_hash", hash);
    p.set_meta("particle", &scn.particle);
    p.set_meta("absorber_height_m", variant.absorber_height);
    p.set_meta("extra_accel_mps2", variant.extra_accel);
    let pops: Vec<usize> = slices.iter().map(|s| s.n_populated).collect();
    p.set_meta("populated_states_min", pops.iter().min().copied().unwrap_or(0));
    p.set_meta("populated_states_max", pops.iter().max().copied().unwrap_or(0));
    let cap = slices.iter().map(|s| s.capture).fold(1.0, f64::min);
    p.set_meta("basis_capture_min", format!("{cap:.6}"));
    p.set_meta("flux_weight", "n(v) from the beam spectrum, 1 if flat");
}

/// Runs every variant of a scene.
pub fn simulate(scn: &Scenario, catalog: &Catalog) -> Result<Simulation> {
    scn.validate(catalog)?;
    let particle = catalog.get(&scn.particle)?;
    let hash = scn.hash();
    let mut patterns = Vec::new();
    let mut summary = BTreeMap::new();
    summary.insert("scene".to_string(), scn.name.clone());
    summary.insert("scene_hash".to_string(), hash.clone());
    for variant in scn.variants() {
        let slices = run_slices(scn, catalog, &variant)?;
        let key = |k: &str| if variant.label.is_empty() { k.to_string() } else { format!("{}.{k}", variant.label) };
        let pops: Vec<usize> = slices.iter().map(|s| s.n_populated).collect();
        summary.insert(key("populated_states"), pops.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(";"));
        if scn.outputs.pattern {
            let (mut raw, ratio) = detector_pattern(scn, &variant, &slices)?;
            annotate(&mut raw, scn, &hash, &variant, &slices);
            summary.insert(key("z_over_z0_min"), format!("{ratio:.4e}"));
            let det = detector_config(scn, &variant)?;
            let conv = (det.x_resolution > 0.0 || det.time_resolution > 0.0).then(|| convolve_resolution(&raw, &det)).transpose()?;
            patterns.push(NamedPattern { stem: stem(scn, &variant, ""), pattern: raw });
            if let Some(conv) = conv {
                patterns.push(NamedPattern { stem: stem(scn, &variant, "convolved"), pattern: conv });
            }
        }
        if scn.outputs.surface_current {
            let mut cur = surface_pattern(scn, particle, &slices)?;
            annotate(&mut cur, scn, &hash, &variant, &slices);
            if scn.outputs.integrate_velocities {
                let ws: Vec<f64> = slices.iter().map(|s| s.weight).collect();
                let integ = integrate_velocities(&cur, &ws)?;
                patterns.push(NamedPattern { stem: stem(scn, &variant, "current"), pattern: cur });
                patterns.push(NamedPattern { stem: stem(scn, &variant, "current-integrated"), pattern: integ });
            } else {
                patterns.push(NamedPattern { stem: stem(scn, &variant, "current"), pattern: cur });
            }
        }
    }
    Ok(Simulation { hash, patterns, summary })
}

/// Normalized-density input of the sensitivity analysis: detector flux at a given value of the
/// analysed acceleration.
pub fn sensitivity_density(scn: &Scenario, catalog: &Catalog, variant: &Variant, a: f64) -> Result<InterferencePattern> {
    let s = scn.sensitivity.as_ref().ok_or_else(|| Error::Validation("sensitivity: missing".into()))?;
    let mut scn = scn.clone();
    let mut variant = variant.clone();
    match s.parameter {
        SensitivityParameter::Gravity => scn.accelerations.gravity_mps2 = a,
        SensitivityParameter::Extra => variant.extra_accel = a,
    }
    let slices = run_slices(&scn, catalog, &variant)?;
    let (raw, _) = detector_pattern(&scn, &variant, &slices)?;
    let det = detector_config(&scn, &variant)?;
    if s.convolved {
        convolve_resolution(&raw, &det)
    } else {
        Ok(raw)
    }
}

/// Event count from the phase-space element of the populated states at the mean velocity.
pub fn phase_space_events(scn: &Scenario, catalog: &Catalog) -> Result<f64> {
    let s = scn.sensitivity.as_ref().ok_or_else(|| Error::Validation("sensitivity: missing".into()))?;
    if let Some(n) = s.events {
        return Ok(n);
    }
    let ps = s.phase_space.as_ref().ok_or_else(|| Error::Validation("sensitivity: no event count".into()))?;
    let particle = catalog.get(&scn.particle)?;
    let vs = scn.velocities()?;
    let v = vs.iter().sum::<f64>() / vs.len() as f64;
    let sc = characteristic_scales(particle.mass_kg, scn.mirror_accel(v))?;
    let dh = scn.absorber.height_m.values()[0];
    let gamma = dh / sc.length - 2.0;
    if gamma <= 0.0 {
        return Err(Error::Domain(format!("absorber height {dh:e} m holds no state above the ground state")));
    }
    let acc = phase_space_acceptance(ps.beam_width_m, gamma, sc.length, sc.energy, particle.mass_kg, v, DEFAULT_COLLIMATION_DELTA)?;
    let f = ps.density_per_m3 / (4.0 / 3.0 * std::f64::consts::PI * ps.v_max_mps.powi(3));
    let brightness = f * v * ps.longitudinal_window_mps * ps.lateral_window_mps;
    Ok(acc.event_count(brightness, ps.duration_s, ps.collimation))
}

/// Result of a scene sensitivity run.
#[derive(Debug, Clone)]
pub struct SensitivityOutcome {
    pub fisher: FisherReport,
    pub events: f64,
    pub nominal: f64,
    pub sigma: f64,
    /// Quantity the relative bound is quoted against.
    pub reference: f64,
    pub relative: f64,
    pub charge_bound_e: Option<f64>,
    /// dP/da on the pattern grid.
    pub derivative: InterferencePattern,
    /// Baseline vs. largest extra acceleration, when the scene lists several.
    pub shift: Option<ShiftReport>,
    pub summary: BTreeMap<String, String>,
}

pub fn run_sensitivity(scn: &Scenario, catalog: &Catalog, events_override: Option<f64>, step_override: Option<f64>) -> Result<SensitivityOutcome> {
    scn.validate(catalog)?;
    let s = scn.sensitivity.as_ref().ok_or_else(|| Error::Validation("sensitivity: scene has no [sensitivity] table".into()))?;
    let particle = catalog.get(&scn.particle)?;
    let variants = scn.variants();
    let base = &variants[0];
    let nominal = match s.parameter {
        SensitivityParameter::Gravity => scn.accelerations.gravity_mps2,
        SensitivityParameter::Extra => base.extra_accel,
    };
    let extras: Vec<f64> = variants.iter().map(|v| v.extra_accel).collect();
    let reference = s.reference_mps2.unwrap_or(match s.parameter {
        SensitivityParameter::Gravity => nominal,
        SensitivityParameter::Extra => extras.iter().fold(0.0, |m, e| m.max(e.abs())),
    });
    let events = match events_override {
        Some(n) => n,
        None => phase_space_events(scn, catalog)?,
    };
    let probe = sensitivity_density(scn, catalog, base, nominal)?;
    let cell = pattern_cell(&probe);
    let gen = |a: f64| -> Result<Vec<f64>> {
        Ok(sensitivity_density(scn, catalog, base, a)?.values.into_iter().flatten().collect())
    };
    let fisher = match step_override.or(s.step_mps2) {
        Some(step) => fisher_information(gen, nominal, step, cell)?,
        None => {
            let seed = if reference > 0.0 { 1e-2 * reference } else { 1e-3 * nominal.abs().max(1e-9) };
            fisher_information_auto(gen, nominal, seed, cell)?
        }
    };
    let sigma = cramer_rao(fisher.information, events)?;
    let relative = if reference > 0.0 { sigma / reference } else { f64::NAN };
    let charge = s.field_v_per_m.map(|f| charge_bound_e(sigma, f, particle.mass_kg)).transpose()?;

    let nx = probe.coords.len();
    let mut derivative = probe.clone();
    derivative.values = fisher.derivative.chunks(nx).map(|c| c.to_vec()).collect();
    derivative.set_meta("quantity", "dP/da (1/(m (m/s) (m/s^2)))");
    derivative.set_meta("scene_hash", scn.hash());
    derivative.set_meta("scene", &scn.name);

    let shift = if variants.len() > 1 && s.parameter == SensitivityParameter::Extra {
        let last = variants.iter().rev().find(|v| v.absorber_height == base.absorber_height && v.extra_accel != base.extra_accel);
        match last {
            Some(v) => {
                let b = sensitivity_density(scn, catalog, base, base.extra_accel)?;
                let t = sensitivity_density(scn, catalog, base, v.extra_accel)?;
                Some(shift_experiment(&b, &t, v.extra_accel - base.extra_accel, sigma)?)
            }
            None => None,
        }
    } else {
        None
    };

    let mut summary = BTreeMap::new();
    let put = |m: &mut BTreeMap<String, String>, k: &str, v: String| {
        m.insert(k.to_string(), v);
    };
    put(&mut summary, "scene", scn.name.clone());
    put(&mut summary, "scene_hash", scn.hash());
    put(&mut summary, "parameter", format!("{:?}", s.parameter).to_lowercase());
    put(&mut summary, "nominal_mps2", format!("{nominal:e}"));
    put(&mut summary, "step_mps2", format!("{:e}", fisher.step));
    put(&mut summary, "peak_relative_change", format!("{:.4e}", fisher.peak_change));
    put(&mut summary, "I_per_event", format!("{:.6e}", fisher.information));
    put(&mut summary, "N", format!("{events:.6e}"));
    put(&mut summary, "sigma_mps2", format!("{sigma:.6e}"));
    put(&mut summary, "reference_mps2", format!("{reference:e}"));
    put(&mut summary, "sigma_relative", format!("{relative:.6e}"));
    put(&mut summary, "excluded_mass", format!("{:.3e}", fisher.excluded_mass));
    put(&mut summary, "density", if s.convolved { "convolved flux" } else { "raw flux" }.to_string());
    let d = scn.detector.as_ref().expect("validated");
    put(&mut summary, "window_x_m", format!("{:e}..{:e}", d.x_range_m[0], d.x_range_m[1]));
    let vs = scn.velocities()?;
    put(&mut summary, "window_v_mps", format!("{:e}..{:e}", vs[0], vs[vs.len() - 1]));
    put(&mut summary, "nuisance", "held fixed".to_string());
    put(&mut summary, "caveat", CAVEAT.to_string());
    if let Some(q) = charge {
        put(&mut summary, "charge_bound_e", format!("{q:.4e}"));
    }
    if let Some(sh) = &shift {
        put(&mut summary, "shift_chi2_per_event", format!("{:.4e}", sh.chi2_per_event));
        put(&mut summary, "shift_significance", format!("{:.4e}", sh.significance));
        put(&mut summary, "shift_max_abs_difference", format!("{:.4e}", sh.max_abs_difference));
    }
    Ok(SensitivityOutcome {
        fisher,
        events,
        nominal,
        sigma,
        reference,
        relative,
        charge_bound_e: charge,
        derivative,
        shift,
        summary,
    })
}
