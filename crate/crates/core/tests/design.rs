use num_complex::Complex64;
use proptest::prelude::*;

use wgs_core::constants::{E_CHARGE, G_STANDARD, HBAR};
use wgs_core::design::*;
use wgs_core::particle::Catalog;
use wgs_core::qr::QrModel;
use wgs_core::scales::{acceleration_for_time, centrifugal_acceleration, characteristic_scales};
use wgs_core::scenario;

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

#[test]
fn shipped_tables_reproduce_their_fitted_critical_energies() {
    let cat = Catalog::default();
    for (table, particle, beta, want_ev) in [("silica_h", "H", 10.0, 1.2e-11), ("silica_hbar", "Hbar", 5.0, 2.03e-10)] {
        let qr = QrModel::Tabulated(scenario::shipped_table(table).unwrap().unwrap());
        let e = qr.effective_critical_energy(cat.get(particle).unwrap().mass_kg, beta).unwrap() / E_CHARGE;
        assert!(rel(e, want_ev) < 0.01, "{table}: {e:e}");
    }
}

#[test]
fn hard_wall_material_design_is_a_domain_error() {
    let cat = Catalog::default();
    let mode = DesignMode::Material { qr: QrModel::HardWall, beta: 3.0, gamma: 5.0, constraint: Constraint::Length(1.0), mirror_length: None };
    assert!(matches!(design(cat.get("n").unwrap(), &mode), Err(wgs_core::Error::Domain(_))));
}

#[test]
fn impractical_absorber_is_flagged() {
    let cat = Catalog::default();
    let d = design(cat.get("n").unwrap(), &DesignMode::Transit { length: 1.0, beta: 3.0, velocity: 2.0, gamma: 100.0 }).unwrap();
    assert!(d.flags.iter().any(|f| f.starts_with("absorber_infeasible")));
    assert!(d.flags.iter().any(|f| f.starts_with("absorber_height_impractical")));
}

#[test]
fn collimation_vanishes_for_wide_margins() {
    let ps = phase_space_acceptance(0.1, 10.0, 6e-6, 1e-31, 1.7e-27, 50.0, 1e12).unwrap();
    assert!(ps.collimation < 1e-15);
    assert!(phase_space_acceptance(0.0, 10.0, 6e-6, 1e-31, 1.7e-27, 50.0, 5.0).is_err());
}

#[test]
fn observation_time_respects_cap_and_loss() {
    let cat = Catalog::default();
    let n = cat.get("n").unwrap();
    let free = design_reduced_gravity(n, 1.0, 3.0, 2.0, 10.0, &StorageInput::default()).unwrap();
    assert_eq!(free.t_obs, free.loss_time.min(free.overlap_time));
    let capped = design_reduced_gravity(n, 1.0, 3.0, 2.0, 10.0, &StorageInput { observation_cap: Some(5.0), ..StorageInput::default() }).unwrap();
    assert_eq!(capped.t_obs, 5.0);
    assert!((capped.tilt - capped.base.accel / G_STANDARD).abs() < 1e-18);
}

proptest! {
    #[test]
    fn scales_are_self_consistent(m in 1e-30f64..1e-26, a in 1e-4f64..1e7) {
        let s = characteristic_scales(m, a).unwrap();
        prop_assert!(rel(s.energy, m * a * s.length) < 1e-12);
        prop_assert!(rel(s.time * s.energy, HBAR) < 1e-12);
        prop_assert!(rel(s.energy.powi(3), HBAR * HBAR * m * a * a / 2.0) < 1e-12);
        prop_assert!(rel(acceleration_for_time(m, s.time).unwrap(), a) < 1e-10);
    }

    #[test]
    fn energy_grows_as_two_thirds_power_of_acceleration(m in 1e-30f64..1e-26, a in 1e-3f64..1e5, k in 1.1f64..100.0) {
        let e1 = characteristic_scales(m, a).unwrap().energy;
        let e2 = characteristic_scales(m, k * a).unwrap().energy;
        prop_assert!(rel(e2 / e1, k.powf(2.0 / 3.0)) < 1e-10);
    }

    #[test]
    fn transit_design_closes(l in 0.01f64..5.0, beta in 1.0f64..20.0, v in 1.0f64..1e5, gamma in 2.0f64..20.0) {
        let cat = Catalog::default();
        let d = design(cat.get("H").unwrap(), &DesignMode::Transit { length: l, beta, velocity: v, gamma }).unwrap();
        prop_assert!(rel(d.tau * beta * v, l) < 1e-12);
        prop_assert!(rel(d.radius.unwrap() * d.accel, v * v) < 1e-12);
        prop_assert!(rel(d.delta_h.unwrap(), gamma * d.char_length) < 1e-12);
        prop_assert!(rel(d.g_over_a * d.accel, G_STANDARD) < 1e-12);
    }

    #[test]
    fn radius_constraint_closes(r in 1.0f64..1e4, beta in 2.0f64..20.0, gamma in 2.0f64..20.0, im in 1e-9f64..1e-7) {
        let cat = Catalog::default();
        let qr = QrModel::scattering_length(Complex64::new(0.0, -im)).unwrap();
        let mode = DesignMode::Material { qr, beta, gamma, constraint: Constraint::Radius(r), mirror_length: None };
        let d = design(cat.get("H").unwrap(), &mode).unwrap();
        prop_assert!(rel(centrifugal_acceleration(d.velocity, r).unwrap(), d.accel) < 1e-12);
        prop_assert!(rel(d.energy * gamma, d.e_lim.unwrap()) < 1e-12);
        prop_assert!(rel(d.mirror_length.unwrap(), beta * d.velocity * d.tau) < 1e-12);
    }

    #[test]
    fn critical_energy_falls_with_bounce_count(b1 in 1.0f64..10.0, k in 1.1f64..5.0, im in 1e-9f64..1e-7) {
        let qr = QrModel::scattering_length(Complex64::new(0.0, -im)).unwrap();
        let m = 1.67e-27;
        let e1 = qr.effective_critical_energy(m, b1).unwrap();
        let e2 = qr.effective_critical_energy(m, k * b1).unwrap();
        prop_assert!(e2 < e1);
        prop_assert!((qr.reflection_probability(e1, m).unwrap().powf(b1) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn acceptance_volume_is_linear_in_beam_width(w in 1e-3f64..1.0, k in 1.5f64..10.0) {
        let a = phase_space_acceptance(w, 10.0, 6e-6, 1e-31, 1.7e-27, 50.0, 5.0).unwrap();
        let b = phase_space_acceptance(k * w, 10.0, 6e-6, 1e-31, 1.7e-27, 50.0, 5.0).unwrap();
        prop_assert!(rel(b.volume, k * a.volume) < 1e-12);
        prop_assert!(rel(b.event_count(1.0, 1.0, true), k * a.event_count(1.0, 1.0, true)) < 1e-12);
    }
}
