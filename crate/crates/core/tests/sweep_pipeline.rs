use fris_covert::analytics::{dbm_to_watts, optimal_threshold, ClosedForm};
use fris_covert::config::{load_config, SystemConfig};
use fris_covert::montecarlo::{estimate_cop, estimate_op, estimate_success};
use fris_covert::output::{csv_header, emit_csv, render_csv};
use fris_covert::recipes::{run_recipe, Recipe};
use fris_covert::sweep::{run_sweep, SurfaceMode, SweepSpec, SweepVariable};
use fris_covert::Error;

fn small_system() -> SystemConfig {
    let mut s = SystemConfig::default();
    s.mc.trials = 2_000;
    s.mc.workers = 2;
    s.sweep = SweepSpec {
        start: -60.0,
        stop: -30.0,
        points: 3,
        ..SweepSpec::default()
    };
    s
}

#[test]
fn csv_has_header_plus_one_line_per_point() {
    let system = small_system();
    let result = run_sweep(&system, &system.sweep).unwrap();
    let text = render_csv(&result);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], csv_header().join(","));
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), csv_header().len());
    }
}

#[test]
fn emitted_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut system = small_system();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    emit_csv(&run_sweep(&system, &system.sweep).unwrap(), &a).unwrap();
    system.mc.workers = 1;
    emit_csv(&run_sweep(&system, &system.sweep).unwrap(), &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn single_point_sweep_matches_direct_estimates() {
    let system = small_system();
    let spec = SweepSpec::single(SweepVariable::TransmitPowerDbm, -45.0);
    let row = &run_sweep(&system, &spec).unwrap().rows[0];

    let mut cfg = system.scenario;
    cfg.p_a = dbm_to_watts(-45.0);
    let zeta = optimal_threshold(&cfg).unwrap();
    assert_eq!(row.analytic, ClosedForm::evaluate(&row.fit, &cfg).unwrap());
    for mode in SurfaceMode::ALL {
        let mc = mode.configure(&system.mc);
        let active = if mode == SurfaceMode::Ris { row.m_hat } else { row.m_o };
        let e = row.estimates(mode).unwrap();
        assert_eq!(e.op, estimate_op(&mc, &cfg, &system.geometry, active).unwrap());
        assert_eq!(e.cop, estimate_cop(&mc, &cfg, &system.geometry, active, zeta).unwrap());
        assert_eq!(e.success, estimate_success(&mc, &cfg, &system.geometry, active, zeta).unwrap());
    }
}

#[test]
fn analytic_only_sweep_leaves_mode_cells_empty() {
    let mut system = small_system();
    system.modes = "none".parse().unwrap();
    let result = run_sweep(&system, &system.sweep).unwrap();
    assert!(result.rows.iter().all(|r| r.fris.is_none() && r.fixed.is_none() && r.ris.is_none()));
    let text = render_csv(&result);
    assert!(text.lines().nth(1).unwrap().ends_with(",,,"));
}

#[test]
fn port_sweep_changes_fit() {
    let mut system = small_system();
    system.modes = "none".parse().unwrap();
    let spec = SweepSpec {
        variable: SweepVariable::ActivePorts,
        start: 4.0,
        stop: 36.0,
        points: 3,
        scale: fris_covert::sweep::SweepScale::Linear,
    };
    let result = run_sweep(&system, &spec).unwrap();
    let m: Vec<usize> = result.rows.iter().map(|r| r.m_o).collect();
    assert_eq!(m, vec![4, 20, 36]);
    assert!(result.rows[0].fit.mean() < result.rows[2].fit.mean());
}

#[test]
fn config_file_drives_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        r#"
[scenario]
p_a_dbm = -40.0
mu_factor = 2.0

[surface]
m_o = 16

[montecarlo]
trials = 1000
seed = 99
modes = "fixed"

[sweep]
start = -50.0
stop = -40.0
points = 2
"#,
    )
    .unwrap();
    let system = load_config(&path).unwrap();
    assert!(system.warnings.is_empty(), "{:?}", system.warnings);
    assert_eq!(system.ports.m_o, 16);
    assert_eq!(system.mc.master_seed, 99);
    assert_eq!(system.scenario.mu_offset, 2.0 * system.scenario.sigma2_w);
    let result = run_sweep(&system, &system.sweep).unwrap();
    assert_eq!(result.values(), vec![-50.0, -40.0]);
    assert!(result.rows[0].fixed.is_some() && result.rows[0].fris.is_none());
}

#[test]
fn bad_config_is_reported_as_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[surface]\nm_o = 500\n").unwrap();
    let err = load_config(&path).unwrap_err();
    assert!(err.is_config_error(), "{err}");
    std::fs::write(&path, "[scenario\n").unwrap();
    assert!(matches!(load_config(&path), Err(Error::Parse { .. })));
}

#[test]
fn recipe_writes_csv_and_svg() {
    let mut system = small_system();
    system.mc.trials = 500;
    system.sweep.points = 2;
    let dir = tempfile::tempdir().unwrap();
    let figure = run_recipe(Recipe::Covertness, &system).unwrap();
    assert_eq!(figure.panels.len(), 4);
    let files = figure.write(dir.path()).unwrap();
    assert_eq!(files.len(), 5);
    for f in &files {
        assert!(std::fs::metadata(f).unwrap().len() > 0);
    }
    let svg = std::fs::read_to_string(dir.path().join("covertness.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}
