use wgs_core::particle::Catalog;
use wgs_core::pipeline::*;
use wgs_core::propagation::{Axis, InterferencePattern};
use wgs_core::scenario::Scenario;
use wgs_core::sensitivity::{pattern_cell, shift_experiment};

#[test]
fn flat_mirror_shares_one_basis_across_velocities() {
    let scn = Scenario::shipped("vcn-gqs").unwrap();
    let slices = run_slices(&scn, &Catalog::default(), &scn.variants()[0]).unwrap();
    assert_eq!(slices.len(), 151);
    assert!(slices.iter().all(|s| s.accel == slices[0].accel && s.n_populated == slices[0].n_populated));
    // absorber losses only remove norm
    assert!(slices.iter().all(|s| s.exit.norm() <= s.entrance_norm * (1.0 + 1e-12)));
}

#[test]
fn free_basis_captures_the_absorber_states() {
    let scn = Scenario::shipped("ps-wgs").unwrap();
    let slices = run_slices(&scn, &Catalog::default(), &scn.variants()[0]).unwrap();
    for s in &slices {
        assert!(s.capture >= scn.solver.capture_target, "{}", s.capture);
        assert!(s.captured <= s.incoming * (1.0 + 1e-12));
        assert!(s.free.is_some());
    }
}

#[test]
fn simulation_outputs_carry_scene_metadata() {
    let scn = Scenario::shipped("ucn-reduced").unwrap();
    let sim = simulate(&scn, &Catalog::default()).unwrap();
    assert_eq!(sim.hash, scn.hash());
    // one raw pattern per variant, no resolution set in this scene
    let stems: Vec<&str> = sim.patterns.iter().map(|p| p.stem.as_str()).collect();
    assert_eq!(stems, ["ucn-reduced-a0", "ucn-reduced-a1"]);
    for p in &sim.patterns {
        let csv = p.pattern.to_csv();
        let back = InterferencePattern::parse_csv(&csv, "mem").unwrap();
        assert_eq!(back.to_csv(), csv);
        let meta: Vec<&str> = csv.lines().take_while(|l| l.starts_with('#')).collect();
        assert!(meta.iter().any(|l| l.contains("scene_hash") && l.contains(&sim.hash)));
        assert!(meta.iter().any(|l| l.contains("far_field")));
    }
}

#[test]
fn surface_current_scene_integrates_over_velocity() {
    let scn = Scenario::shipped("mu-wgs").unwrap();
    let sim = simulate(&scn, &Catalog::default()).unwrap();
    let rows = sim.patterns.iter().find(|p| p.stem == "mu-wgs-current").unwrap();
    let total = sim.patterns.iter().find(|p| p.stem == "mu-wgs-current-integrated").unwrap();
    assert_eq!(rows.pattern.axis, Axis::Z);
    assert_eq!(total.pattern.values.len(), 1);
    let dv = rows.pattern.velocities[1] - rows.pattern.velocities[0];
    for (j, f) in total.pattern.values[0].iter().enumerate() {
        let sum: f64 = rows.pattern.values.iter().map(|r| r[j]).sum::<f64>() * dv;
        assert!((f - sum).abs() <= 1e-12 * sum.abs().max(1e-300));
    }
    // the current is positive and decays along the mirror past the absorber
    let row = &total.pattern.values[0];
    assert!(row.iter().all(|f| *f > 0.0));
    assert!(row.last().unwrap() < row.first().unwrap());
}

#[test]
fn zero_extra_acceleration_gives_zero_pattern_difference() {
    let scn = Scenario::shipped("ucn-reduced").unwrap();
    let cat = Catalog::default();
    let v = &scn.variants()[0];
    let a = sensitivity_density(&scn, &cat, v, 0.0).unwrap();
    let b = sensitivity_density(&scn, &cat, v, 0.0).unwrap();
    let r = shift_experiment(&a, &b, 0.0, 1e-7).unwrap();
    assert_eq!(r.max_abs_difference, 0.0);
    assert_eq!(r.significance, 0.0);
    assert!(pattern_cell(&a) > 0.0);
}

#[test]
fn extra_acceleration_moves_the_pattern() {
    let scn = Scenario::shipped("ucn-reduced").unwrap();
    let cat = Catalog::default();
    let v = &scn.variants()[0];
    let a = sensitivity_density(&scn, &cat, v, 0.0).unwrap();
    let b = sensitivity_density(&scn, &cat, v, 2.6e-5).unwrap();
    let r = shift_experiment(&a, &b, 2.6e-5, 1e-6).unwrap();
    assert!(r.max_abs_difference > 0.0 && r.chi2_per_event > 0.0);
    assert!((r.significance - 26.0).abs() < 1e-9);
}

#[test]
fn event_count_is_linear_in_duration() {
    let cat = Catalog::default();
    let mut scn = Scenario::shipped("ucn-reduced").unwrap();
    let n1 = phase_space_events(&scn, &cat).unwrap();
    scn.set_key("sensitivity.phase_space.duration_s", "1728000").unwrap();
    let n2 = phase_space_events(&scn, &cat).unwrap();
    assert!((n2 / n1 - 2.0).abs() < 1e-12);
}

#[test]
fn sensitivity_report_keys_are_present() {
    let scn = Scenario::shipped("ucn-reduced").unwrap();
    let out = run_sensitivity(&scn, &Catalog::default(), Some(1e4), None).unwrap();
    for key in ["I_per_event", "N", "sigma_mps2", "excluded_mass", "caveat", "window_x_m", "nuisance", "scene_hash"] {
        assert!(out.summary.contains_key(key), "{key}");
    }
    assert_eq!(out.events, 1e4);
    assert!(out.shift.is_some());
}
