use sonon::pilot::{tunneling_transmission, ScenarioKind, ScenarioSpec};

#[test]
fn trajectory_and_wave_transmission_agree() {
    let report = tunneling_transmission(&ScenarioSpec::barrier(), 2000, 3).unwrap();
    assert!(report.agree_within_3_sigma, "{report:?}");
    assert_eq!(report.aborted, 0);
    assert!((report.wave_transmission - report.packet_transmission).abs() < 2e-3, "{report:?}");
}

#[test]
fn tall_barrier_is_nearly_opaque() {
    let mut spec = ScenarioSpec::barrier();
    if let ScenarioKind::Barrier { height, width, .. } = &mut spec.kind {
        *height = 8.0;
        *width = 2.0;
    }
    let report = tunneling_transmission(&spec, 1000, 1).unwrap();
    assert!(report.wave_transmission < 1e-4, "{report:?}");
    assert!(report.trajectory_fraction <= 3.0 * report.mc_std_error, "{report:?}");
}
