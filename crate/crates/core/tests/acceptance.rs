//! Acceptance criteria, one `PASS` or `FAIL` line each. Runs without the libtest harness so
//! every line is printed; the process fails if any criterion fails.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;

use wgs_core::constants::{E_CHARGE, G_STANDARD, HBAR};
use wgs_core::design::{design, design_reduced_gravity, Constraint, DesignMode, StorageInput};
use wgs_core::particle::{Catalog, ParticleSpec};
use wgs_core::pipeline::{detector_config, run_sensitivity, run_slices, simulate, VelocitySlice};
use wgs_core::propagation::*;
use wgs_core::qr::QrModel;
use wgs_core::scales::characteristic_scales;
use wgs_core::scenario::{self, Scenario};
use wgs_core::solver::*;

struct Outcome {
    criterion: &'static str,
    ok: bool,
    detail: String,
}

fn report(criterion: &'static str, ok: bool, detail: &str) -> Outcome {
    Outcome { criterion, ok, detail: detail.to_string() }
}

/// Equal when `x` rounds to `target` at the number of significant figures `target` is quoted
/// with (two for "5.1e-3", one for "1e-5").
fn same_figures(x: f64, target: &str) -> bool {
    let mantissa = target.split(['e', 'E']).next().unwrap();
    let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
    let t: f64 = target.parse().unwrap();
    format!("{x:.*e}", digits - 1) == format!("{t:.*e}", digits - 1)
}

/// Checks (name, value, quoted target) rows; returns the verdict and a detail line.
fn check_rows(rows: &[(&str, f64, &str)]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, v, t) in rows {
        let pass = same_figures(*v, t);
        ok &= pass;
        parts.push(format!("{name}={v:.3e}[{t}]{}", if pass { "" } else { "!" }));
    }
    (ok, parts.join(" "))
}

fn table(name: &str) -> QrModel {
    QrModel::Tabulated(scenario::shipped_table(name).unwrap().unwrap())
}

fn ev(j: f64) -> f64 {
    j / E_CHARGE
}

fn gqs_scales_for_the_neutron() -> Outcome {
    let cat = Catalog::default();
    let s = characteristic_scales(cat.get("n").unwrap().mass_kg, G_STANDARD).unwrap();
    let (ok, d) = check_rows(&[("E_eV", ev(s.energy), "6.0e-13"), ("l_m", s.length, "5.9e-6"), ("tau_s", s.time, "1.1e-3")]);
    report("neutron GQS scales", ok, &d)
}

fn design_chain_reduced_gravity_ucn() -> Outcome {
    let cat = Catalog::default();
    let storage = StorageInput { observation_cap: Some(20.0), ..StorageInput::default() };
    let r = design_reduced_gravity(cat.get("n").unwrap(), 1.0, 3.0, 2.0, 10.0, &storage).unwrap();
    let (ok, d) = check_rows(&[
        ("g_red", r.base.accel, "5.1e-3"),
        ("tilt_rad", r.tilt, "5.2e-4"),
        ("E_eV", ev(r.base.energy), "3.9e-15"),
        ("v_perp", r.v_perp, "8.6e-4"),
        ("l", r.base.char_length, "7.2e-5"),
        ("t_s", r.t_obs, "2.0e1"),
        ("D_m", r.trajectory_length, "4.0e1"),
        ("dx_m", r.pattern_size, "3.5e-2"),
    ]);
    report("design chain, reduced-gravity UCN", ok, &d)
}

fn design_chain_hydrogen_wgs() -> Outcome {
    let cat = Catalog::default();
    let mode = DesignMode::Material { qr: table("silica_h"), beta: 10.0, gamma: 4.56, constraint: Constraint::Length(0.3), mirror_length: None };
    let r = design(cat.get("H").unwrap(), &mode).unwrap();
    let (ok, d) = check_rows(&[
        ("a", r.accel, "9.0e1"),
        ("v", r.velocity, "1.2e2"),
        ("R", r.radius.unwrap(), "1.6e2"),
        ("g_over_a", r.g_over_a, "1.1e-1"),
    ]);
    report("design chain, H WGS", ok, &d)
}

fn design_chain_antihydrogen_wgs() -> Outcome {
    let cat = Catalog::default();
    let mode = DesignMode::Material { qr: table("silica_hbar"), beta: 5.0, gamma: 5.0, constraint: Constraint::Radius(1e4), mirror_length: None };
    let r = design(cat.get("Hbar").unwrap(), &mode).unwrap();
    let (ok, d) = check_rows(&[
        ("E_lim_eV", ev(r.e_lim.unwrap()), "2.0e-10"),
        ("a", r.accel, "5.4e3"),
        ("v", r.velocity, "7.4e3"),
        ("l", r.char_length, "7.1e-7"),
    ]);
    report("design chain, H-bar WGS", ok, &d)
}

fn design_chain_muonium_wgs() -> Outcome {
    let cat = Catalog::default();
    let mode = DesignMode::Acceleration { accel: 1e6, velocity: 2200.0, lifetimes: 3.0, qr: Some(table("silica_mu")) };
    let r = design(cat.get("Mu").unwrap(), &mode).unwrap();
    let (ok, d) = check_rows(&[
        ("tau", r.tau, "9.3e-7"),
        ("beta", r.beta, "2.3e0"),
        ("R", r.radius.unwrap(), "4.8e0"),
        ("l", r.char_length, "5.6e-7"),
        ("gamma", r.gamma.unwrap(), "8.6e2"),
        ("g_over_a", r.g_over_a, "1e-5"),
    ]);
    report("design chain, Mu WGS", ok, &d)
}

fn design_chain_positronium_wgs() -> Outcome {
    let cat = Catalog::default();
    let mode = DesignMode::Transit { length: 0.5, beta: 3.0, velocity: 5e4, gamma: 10.0 };
    let r = design(cat.get("Ps33").unwrap(), &mode).unwrap();
    let (ok, d) = check_rows(&[
        ("tau", r.tau, "3.3e-6"),
        ("a", r.accel, "1.8e6"),
        ("g_over_a", r.g_over_a, "5.5e-6"),
        ("R", r.radius.unwrap(), "1.4e3"),
        ("l", r.char_length, "9.8e-6"),
        ("delta_h", r.delta_h.unwrap(), "9.8e-5"),
    ]);
    report("design chain, Ps(n=33) WGS", ok, &d)
}

fn vcn_gravity_sensitivity() -> Outcome {
    let cat = Catalog::default();
    let scn = Scenario::shipped("vcn-gqs").unwrap();
    let start = Instant::now();
    let out = run_sensitivity(&scn, &cat, None, None).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let rel = out.relative;
    let ok = out.events == 2e4 && (0.5e-4..=2e-4).contains(&rel) && secs < 300.0;
    report("VCN sigma_g/g within x2 of 1e-4 at N=2e4", ok, &format!("sigma_g/g={rel:.3e} N={:.1e} runtime={secs:.1}s", out.events))
}

fn ucn_big_g_and_charge_sensitivity() -> Outcome {
    let cat = Catalog::default();
    let scn = Scenario::shipped("ucn-reduced").unwrap();
    let out = run_sensitivity(&scn, &cat, None, None).unwrap();
    // "a few times 1e-3" is taken as 3e-3 before the run
    let g_ok = (1e-3..=9e-3).contains(&out.relative);
    let q = out.charge_bound_e.unwrap();
    let q_ok = (1e-22 / 3.0..=3e-22).contains(&q);
    report(
        "UCN sigma_G/G within x3 of 3e-3 and q_n bound within x3 of 1e-22 e",
        g_ok && q_ok,
        &format!("sigma_G/G={:.3e}{} q={q:.3e}e{} N={:.3e}", out.relative, if g_ok { "" } else { "!" }, if q_ok { "" } else { "!" }, out.events),
    )
}

fn sturm_count(diag: &[f64], off: f64, x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for d in &diag[1..] {
        let prev = if q == 0.0 { 1e-300 } else { q };
        q = d - x - off * off / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `n` levels of the 3-point finite-difference Hamiltonian on (0, x_max), by bisection.
fn fd_levels(mass: f64, accel: f64, x_max: f64, points: usize, n: usize) -> Vec<f64> {
    let dx = x_max / (points + 1) as f64;
    let c = HBAR * HBAR / (2.0 * mass * dx * dx);
    let diag: Vec<f64> = (1..=points).map(|i| 2.0 * c + mass * accel * i as f64 * dx).collect();
    let top = 4.0 * c + mass * accel * x_max;
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (0.0, top);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if sturm_count(&diag, -c, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

fn mean_velocity(scn: &Scenario) -> f64 {
    let v = scn.velocities().unwrap();
    let w = scn.weights(&v).unwrap();
    v.iter().zip(&w).map(|(v, w)| v * w).sum::<f64>() / w.iter().sum::<f64>()
}

fn eigen_solver_matches_finite_differences() -> Outcome {
    let cat = Catalog::default();
    let mut worst = (0.0, String::new());
    for name in ["vcn-gqs", "h-wgs", "hbar-wgs", "mu-wgs", "ps-wgs"] {
        let scn = Scenario::shipped(name).unwrap();
        let m = cat.get(&scn.particle).unwrap().mass_kg;
        let accel = scn.mirror_accel(scn.velocities().unwrap()[0].min(mean_velocity(&scn)));
        let s = characteristic_scales(m, accel).unwrap();
        let grid = HeightGrid::for_states(s.length, 13.0, 0.0, None, 2.0).unwrap();
        let set = solve_single_wall(m, accel, 10, &grid).unwrap();
        let x_max = 24.0 * s.length;
        let coarse = fd_levels(m, accel, x_max, 2400, 10);
        let fine = fd_levels(m, accel, x_max, 4801, 10);
        for (i, st) in set.states.iter().enumerate() {
            // Richardson extrapolation of the O(dx^2) scheme
            let oracle = (4.0 * fine[i] - coarse[i]) / 3.0;
            let rel = (st.energy / oracle - 1.0).abs();
            if rel > worst.0 {
                worst = (rel, format!("{} n={}", scn.particle, i + 1));
            }
        }
    }
    report("single-wall E_n vs finite differences, n<=10, five particles", worst.0 < 1e-4, &format!("max rel err {:.2e} at {}", worst.0, worst.1))
}

fn linf_rel(a: &[f64], b: &[f64]) -> f64 {
    let peak = b.iter().cloned().fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / peak
}

fn sp_error(spec: &SpectralPacket, v: f64) -> f64 {
    let z = 100.0 * spec.z0();
    let (_, sigma_k) = spec.moments();
    let width = 6.0 * sigma_k * z / spec.k0;
    let xs: Vec<f64> = (0..1201).map(|i| -width + 2.0 * width * i as f64 / 1200.0).collect();
    let (sp, _) = far_field_flux(spec, &DetectorConfig::new(z), v, &xs, 1.0, false).unwrap();
    linf_rel(&sp, &fresnel_flux(spec, z, &xs, 1.0))
}

fn slices_of(name: &str) -> (Scenario, Vec<VelocitySlice>) {
    let scn = Scenario::shipped(name).unwrap();
    let variant = scn.variants().remove(0);
    let slices = run_slices(&scn, &Catalog::default(), &variant).unwrap();
    (scn, slices)
}

fn nearest(slices: &[VelocitySlice], v: f64) -> &VelocitySlice {
    slices.iter().min_by(|a, b| (a.velocity - v).abs().partial_cmp(&(b.velocity - v).abs()).unwrap()).unwrap()
}

fn stationary_phase_matches_fresnel_quadrature() -> Outcome {
    let v = 50.0;
    let k0 = wgs_core::constants::M_NEUTRON * v / HBAR;
    let sigma = 3e-6;
    let grid = HeightGrid::covering(20e-6 + 14.0 * sigma, sigma / 40.0, None).unwrap();
    let gauss = WavePacket::gaussian(&grid, 20e-6, sigma, 0.0).unwrap();
    let e_gauss = sp_error(&to_spectrum(&gauss, k0).unwrap(), v);
    let (_, slices) = slices_of("vcn-gqs");
    let s = nearest(&slices, v);
    let e_vcn = sp_error(&to_spectrum(&s.exit, s.mass * s.velocity / HBAR).unwrap(), s.velocity);
    report(
        "stationary phase vs Fresnel, L-inf < 1% at z/z0=100",
        e_gauss < 0.01 && e_vcn < 0.01,
        &format!("gaussian {e_gauss:.2e}, vcn exit packet (v={}) {e_vcn:.2e}", s.velocity),
    )
}

fn conservation_suite() -> Outcome {
    let cat = Catalog::default();
    let mut worst_norm: f64 = 0.0;
    let mut worst_flux: f64 = 0.0;
    for name in ["vcn-gqs", "ucn-reduced"] {
        // the shipped mirrors are absorber over their full length; halving the absorber opens a
        // free region over the hard wall
        let mut scn = Scenario::shipped(name).unwrap();
        let half = 0.5 * scn.mirror.length_m;
        scn.set_key("absorber.length_m", &half.to_string()).unwrap();
        let slices = run_slices(&scn, &cat, &scn.variants()[0]).unwrap();
        let particle = cat.get(&scn.particle).unwrap();
        let det = detector_config(&scn, &scn.variants()[0]).unwrap();
        for s in [&slices[0], &slices[slices.len() / 2], &slices[slices.len() - 1]] {
            let (set, c) = s.free.as_ref().unwrap();
            let entry: f64 = set.populated().map(|(i, _)| c[i].norm_sqr()).sum();
            let t = (scn.mirror.length_m - scn.absorber.length_m) / s.velocity;
            let later: f64 = evolve_amplitudes(set, c, t, particle).unwrap().iter().map(|c| c.norm_sqr()).sum();
            worst_norm = worst_norm.max((later / entry - 1.0).abs());
            worst_norm = worst_norm.max((s.exit.norm() / entry - 1.0).abs());
            // the detector-integrated flux equals v times the exit norm
            let k0 = s.mass * s.velocity / HBAR;
            let spec = to_spectrum(&s.exit, k0).unwrap();
            let x_edge = spec.k.last().unwrap() * det.distance / k0;
            let n = 40_001;
            let dx = 2.0 * x_edge / (n - 1) as f64;
            let xs: Vec<f64> = (0..n).map(|i| -x_edge + i as f64 * dx).collect();
            let (f, _) = far_field_flux(&spec, &DetectorConfig::new(det.distance), s.velocity, &xs, s.velocity, true).unwrap();
            let total: f64 = f.iter().sum::<f64>() * dx;
            worst_flux = worst_flux.max((total / (s.velocity * s.exit.norm()) - 1.0).abs());
        }
    }
    // decaying particles: the evolved norm over that of a stable twin is exp(-t / tau)
    let mut worst_decay: f64 = 0.0;
    for name in ["mu-wgs", "ps-wgs"] {
        let (scn, slices) = slices_of(name);
        let particle = cat.get(&scn.particle).unwrap();
        let stable = ParticleSpec { lifetime_s: None, ..particle.clone() };
        let tau = particle.lifetime_s.unwrap();
        let s = &slices[slices.len() / 2];
        let (set, c) = s.free.as_ref().unwrap();
        let t_end = (scn.mirror.length_m - scn.absorber.length_m) / s.velocity;
        for f in [0.1, 0.5, 1.0] {
            let t = f * t_end;
            let norm = |p: &ParticleSpec| evolve_amplitudes(set, c, t, p).unwrap().iter().map(|c| c.norm_sqr()).sum::<f64>();
            let ratio = norm(particle) / norm(&stable);
            worst_decay = worst_decay.max((ratio / (-t / tau).exp() - 1.0).abs());
        }
    }
    report(
        "conservation: lossless norm and flux to 1e-6, decay envelope to 1e-8",
        worst_norm < 1e-6 && worst_flux < 1e-6 && worst_decay < 1e-8,
        &format!("norm {worst_norm:.1e}, detector flux {worst_flux:.1e}, decay envelope {worst_decay:.1e}"),
    )
}

/// States carrying at least this fraction of the largest beat weight take part in the check.
const BEAT_DOMINANCE: f64 = 0.1;

/// Compares beat periods found in `signal` (sampled at `step`) with 2 pi hbar v / dE for
/// adjacent dominant states. Pairs whose period is outside [4 step, window / 2] cannot be
/// resolved by the sampling and are skipped. Returns (worst error, checked, skipped).
fn check_beats(signal: &[f64], step: f64, energies: &[f64], weights: &[f64], v: f64) -> (f64, usize, usize) {
    let found = beat_periods(signal, step, 1e-9).unwrap();
    let wmax = weights.iter().cloned().fold(0.0, f64::max);
    let window = step * (signal.len() - 1) as f64;
    let (mut worst, mut checked, mut skipped) = (0.0f64, 0, 0);
    for i in 0..energies.len().saturating_sub(1) {
        if weights[i] < BEAT_DOMINANCE * wmax || weights[i + 1] < BEAT_DOMINANCE * wmax {
            continue;
        }
        let expected = TAU * HBAR * v / (energies[i + 1] - energies[i]);
        if expected < 4.0 * step || expected > 0.5 * window {
            skipped += 1;
            continue;
        }
        worst = worst.max(closest_relative_error(&found, expected));
        checked += 1;
    }
    (worst, checked, skipped)
}

/// Sample step and count: eight samples per shortest adjacent-pair period, at least three of
/// the longest, and enough samples for the pencil to hold every pair frequency of the K
/// populated states (K^2 - K + 1 poles).
fn beat_sampling(energies: &[f64], weights: &[f64], v: f64) -> (f64, usize) {
    let wmax = weights.iter().cloned().fold(0.0, f64::max);
    let dominant: Vec<usize> = (0..energies.len()).filter(|&i| weights[i] >= BEAT_DOMINANCE * wmax).collect();
    let gaps: Vec<f64> = dominant.windows(2).filter(|w| w[1] == w[0] + 1).map(|w| energies[w[1]] - energies[w[0]]).collect();
    let p_min = TAU * HBAR * v / gaps.iter().cloned().fold(0.0, f64::max);
    let p_max = TAU * HBAR * v / gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    let step = p_min / 8.0;
    let k = weights.iter().filter(|w| **w > 0.0).count();
    let poles = k * k - k + 1;
    (step, ((3.0 * p_max / step) as usize).max(3 * poles).clamp(200, 2400))
}

/// Beats of the surface current past the absorber, for the slice nearest `v`.
fn surface_beats(name: &str, v: f64) -> (f64, usize, usize) {
    let cat = Catalog::default();
    let (scn, slices) = slices_of(name);
    let particle = cat.get(&scn.particle).unwrap();
    let s = nearest(&slices, v);
    let (set, c) = s.free.as_ref().unwrap();
    let b = scn.wall_model().unwrap().effective_scattering_length(particle.mass_kg).map_or(0.0, |a| -a.im);
    let dx = set.grid.dx();
    let weights: Vec<f64> = set
        .states
        .iter()
        .zip(c)
        .map(|(st, c)| if st.populated { c.norm() * wall_slope(&st.psi, dx).abs() } else { 0.0 })
        .collect();
    // beat periods can exceed the mirror; the current is sampled over a longer virtual mirror
    let (dz, n) = beat_sampling(&set.energies(), &weights, s.velocity);
    let ts: Vec<f64> = (0..n).map(|i| i as f64 * dz / s.velocity).collect();
    // the particle decay is a common factor exp(-t / tau) (checked by the conservation suite);
    // dividing it out keeps the extended window above underflow for Mu and Ps
    let stable = ParticleSpec { lifetime_s: None, ..particle.clone() };
    let f = surface_current(set, c, &ts, &stable, b, 1.0).unwrap();
    check_beats(&f, dz, &set.energies(), &weights, s.velocity)
}

/// Beats of the detector flux at the pattern peak as the free mirror length is scanned.
fn detector_beats(name: &str, v: f64) -> (f64, usize, usize) {
    let cat = Catalog::default();
    let (scn, slices) = slices_of(name);
    let particle = cat.get(&scn.particle).unwrap();
    let det = detector_config(&scn, &scn.variants()[0]).unwrap();
    let s = nearest(&slices, v);
    let (set, c) = s.free.as_ref().unwrap();
    let k0 = s.mass * s.velocity / HBAR;
    let spec = to_spectrum(&s.exit, k0).unwrap();
    let k_peak = spec.k.iter().zip(&spec.psi_k).max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap()).map(|(k, _)| *k).unwrap();
    let x = k_peak * det.distance / k0;
    // weight of state i at that momentum
    let weights: Vec<f64> = set
        .states
        .iter()
        .zip(c)
        .map(|(st, c)| {
            let psi: Vec<Complex64> = st.psi.iter().map(|p| Complex64::new(*p, 0.0)).collect();
            let sp = to_spectrum(&WavePacket::new(set.grid.clone(), psi).unwrap(), k0).unwrap();
            if st.populated { c.norm() * sp.eval(k_peak).norm() } else { 0.0 }
        })
        .collect();
    let e = set.energies();
    let (step, n) = beat_sampling(&e, &weights, s.velocity);
    let flux: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 * step / s.velocity;
            let packet = evolve(set, c, t, particle).unwrap();
            let sp = to_spectrum(&packet, k0).unwrap();
            far_field_flux(&sp, &DetectorConfig::new(det.distance), s.velocity, &[x], 1.0, true).unwrap().0[0]
        })
        .collect();
    check_beats(&flux, step, &e, &weights, s.velocity)
}

fn beat_periods_match_level_spacings() -> Outcome {
    let runs = [
        ("h-wgs detector, mirror-length scan", detector_beats("h-wgs", 120.0)),
        ("hbar-wgs current", surface_beats("hbar-wgs", 5e3)),
        ("mu-wgs current", surface_beats("mu-wgs", 2200.0)),
        ("ps-wgs current", surface_beats("ps-wgs", 5e4)),
    ];
    let ok = runs.iter().all(|(_, (err, checked, _))| *checked > 0 && *err < 0.01);
    let detail: Vec<String> = runs.iter().map(|(n, (e, c, s))| format!("{n}: {c} pairs, worst {e:.1e}, {s} unresolvable")).collect();
    report("beat periods vs 2 pi hbar v / dE to 1%", ok, &detail.join("; "))
}

fn resolution_thresholds_wash_out_fringes() -> Outcome {
    let cat = Catalog::default();
    let base = Scenario::shipped("vcn-gqs").unwrap();
    let contrast = |x_res: f64, t_res: f64| {
        let mut scn = base.clone();
        scn.set_key("detector.x_resolution_m", &x_res.to_string()).unwrap();
        scn.set_key("detector.time_resolution_s", &t_res.to_string()).unwrap();
        let sim = simulate(&scn, &cat).unwrap();
        let raw = sim.patterns.iter().find(|p| !p.pattern.convolved).unwrap();
        let conv = sim.patterns.iter().find(|p| p.pattern.convolved).unwrap();
        (fringe_contrast(&raw.pattern), fringe_contrast(&conv.pattern))
    };
    // twice the stated thresholds, fixed before the run
    let (raw, past) = contrast(4e-3, 3e-3);
    let (_, at) = contrast(2e-3, 1.5e-3);
    let (_, fine) = contrast(0.2e-3, 0.15e-3);
    report(
        "resolution past 2 mm / 1.5 ms drops contrast below 10% of unconvolved",
        past < 0.1 * raw,
        &format!("unconvolved {raw:.3e}; 0.2mm/0.15ms {fine:.3e}; 2mm/1.5ms {at:.3e}; 4mm/3ms {past:.3e} ({:.1}%)", 100.0 * past / raw),
    )
}

fn shipped_scenes_are_deterministic() -> Outcome {
    let cat = Catalog::default();
    let mut bad = Vec::new();
    let mut files = 0;
    for name in scenario::shipped_names() {
        let scn = Scenario::shipped(name).unwrap();
        let a = simulate(&scn, &cat).unwrap();
        let b = simulate(&scn, &cat).unwrap();
        files += a.patterns.len();
        let same = a.patterns.len() == b.patterns.len()
            && a.patterns.iter().zip(&b.patterns).all(|(x, y)| x.stem == y.stem && x.pattern.to_csv() == y.pattern.to_csv())
            && a.summary == b.summary;
        if !same {
            bad.push(name);
        }
    }
    report("repeated runs give byte-identical CSV for all shipped scenes", bad.is_empty(), &format!("{files} files per run, differing scenes {bad:?}"))
}

fn sensitivity_step_halving_is_stable() -> Outcome {
    let cat = Catalog::default();
    let mut details = Vec::new();
    let mut ok = true;
    for name in scenario::shipped_names() {
        let scn = Scenario::shipped(name).unwrap();
        if scn.sensitivity.is_none() {
            continue;
        }
        let a = run_sensitivity(&scn, &cat, None, None).unwrap();
        let b = run_sensitivity(&scn, &cat, None, Some(0.5 * a.fisher.step)).unwrap();
        let change = (b.fisher.information / a.fisher.information - 1.0).abs();
        ok &= change < 0.01;
        details.push(format!("{name}: {:.2e}", change));
    }
    report("halving the finite-difference step changes I by < 1%", ok, &details.join(", "))
}

fn main() {
    let checks: Vec<fn() -> Outcome> = vec![
        gqs_scales_for_the_neutron,
        design_chain_reduced_gravity_ucn,
        design_chain_hydrogen_wgs,
        design_chain_antihydrogen_wgs,
        design_chain_muonium_wgs,
        design_chain_positronium_wgs,
        vcn_gravity_sensitivity,
        ucn_big_g_and_charge_sensitivity,
        eigen_solver_matches_finite_differences,
        stationary_phase_matches_fresnel_quadrature,
        conservation_suite,
        beat_periods_match_level_spacings,
        resolution_thresholds_wash_out_fringes,
        shipped_scenes_are_deterministic,
        sensitivity_step_halving_is_stable,
    ];
    // criteria run concurrently; lines are printed in the listed order
    let results: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = checks.iter().map(|f| s.spawn(f)).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| report("criterion", false, "panicked")))
            .collect()
    });
    let mut failed = 0;
    for r in &results {
        println!("{} {}: {}", if r.ok { "PASS" } else { "FAIL" }, r.criterion, r.detail);
        failed += usize::from(!r.ok);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
