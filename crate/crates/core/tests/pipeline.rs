use std::f64::consts::PI;

use xpm_core::sweep::relative_disagreement;
use xpm_core::*;

#[test]
fn config_to_table_on_disk() {
    let cfg = Config::from_text("sweep_points = 12\nsweep_gauss = true\n", &[]).unwrap();
    let spec = cfg.sweep_spec().unwrap();
    let points = run_sweep(&spec).unwrap();
    assert_eq!(points.len(), 12);
    assert!(points
        .iter()
        .all(|p| p.error.is_none() && p.phi_gauss_rad.is_some()));

    let dir = std::env::temp_dir().join(format!("xpm-core-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for format in [TableFormat::Csv, TableFormat::Jsonl] {
        let path = dir.join(format!("table.{}", format.as_str()));
        emit_table(&points, format, &path).unwrap();
        let back = parse_table(&std::fs::read_to_string(&path).unwrap(), format).unwrap();
        assert_eq!(back, points);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn default_config_matches_builtin_system() {
    let cfg = Config::default();
    assert_eq!(cfg.system().unwrap(), xenon_default());
    assert_eq!(cfg.sweep_spec().unwrap(), SweepSpec::default_xenon());
}

#[test]
fn dipole_overrides_replace_einstein_coefficients() {
    let cfg = Config::from_text("lower_dipole = 4.6e-29\n", &[]).unwrap();
    let d = cfg.system().unwrap().derive().unwrap();
    let base = xenon_default().derive().unwrap();
    assert!((d.couplings.g1 / base.couplings.g1 - 2.0).abs() < 1e-3);
    assert_eq!(d.couplings.g2, base.couplings.g2);
}

#[test]
fn methods_converge_once_stark_and_cross_terms_are_small() {
    // low density: the control's collective light shift and the signal's
    // far-detuned cross term are both below 1e-3 of the bare shift
    let mut sys = xenon_default();
    sys.medium.density = 1e12;
    let spec = SweepSpec::new(1e7, 1e10, 31, Spacing::Log, 10e6, sys).unwrap();
    let points = run_sweep(&spec).unwrap();
    let report = divergence_report(&points);
    let from = report.converged_delta_hz.unwrap();
    for p in points.iter().filter(|p| p.delta_hz >= from) {
        assert!(relative_disagreement(p).unwrap() <= 0.02);
    }
    assert!(report.n1_at_convergence.unwrap() < 0.01);
}

#[test]
fn default_sweep_shape() {
    let points = run_sweep(&SweepSpec::default_xenon()).unwrap();
    // pert grows without bound at small Δ while the dressed phase saturates
    let first = &points[0];
    assert!(first.n1.unwrap() > 1e4);
    assert!(first.phi_pert_rad.unwrap() > 100.0);
    assert!(first.phi_diag_rad.unwrap().abs() < 0.01);
    let max = find_max_phase(&points, 0.5).unwrap();
    assert!((2e-3..=200e-3).contains(&max.phi_rad.abs()));
    // the perturbative column is exactly N_eff E4 t at every point
    let d = xenon_default().derive().unwrap();
    for p in &points {
        let s = xenon_default().scenario_from(&d, 2.0 * PI * p.delta_hz, 2.0 * PI * 10e6);
        assert_eq!(p.phi_pert_rad, Some(phi_uniform(&s).unwrap()));
    }
}

#[test]
fn sensitivity_rows_scale_as_expected() {
    let rows = convention_sensitivity(&SweepSpec::default_xenon()).unwrap();
    let get = |prefix: &str| {
        rows.iter()
            .find(|r| r.label.starts_with(prefix))
            .unwrap()
            .max
            .unwrap()
            .phi_rad
            .abs()
    };
    let base = get("baseline");
    // halving t halves the phase exactly
    assert!((get("energy-decay") / base - 0.5).abs() < 1e-12);
    assert!(get("field normalization") > base);
    assert!(get("collective N") > base);
}
