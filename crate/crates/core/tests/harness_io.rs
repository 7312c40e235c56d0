use coop_noma::harness::{
    emit_csv, run_experiment, ExperimentConfig, ExperimentKind, HarnessError, RunMeta, SchemeKind, SweepResult,
    CSV_HEADER,
};

fn small(kind: ExperimentKind) -> ExperimentConfig {
    ExperimentConfig { kind, trials: 4, base_seed: 11, rdmin_grid: "0:1.5:0.5".into(), ..Default::default() }
}

#[test]
fn empty_result_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    let meta = RunMeta { base_seed: 0, config_hash: String::new(), wall_ms: 0, solves: 0, failures: 0, audit_violations: 0 };
    emit_csv(&SweepResult { rows: vec![], meta }, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
}

#[test]
fn rows_cover_grid_and_have_eight_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let res = run_experiment(&small(ExperimentKind::OutageVsRate)).unwrap();
    assert_eq!(res.rows.len(), 4 * 3);
    emit_csv(&res, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 13);
    assert!(lines.iter().all(|l| l.split(',').count() == 8));
    assert!(lines[1].starts_with("0.00000000e0,optimal,"));
    for r in &res.rows {
        assert!((0.0..=1.0).contains(&r.outage_prob));
        if r.sweep_value == 0.0 {
            assert_eq!(r.outage_prob, 0.0);
        }
        assert_eq!(r.wall_ms, 0);
    }
}

#[test]
fn outage_is_nondecreasing_in_the_floor() {
    let res = run_experiment(&small(ExperimentKind::OutageVsRate)).unwrap();
    for s in [SchemeKind::Optimal, SchemeKind::Zf, SchemeKind::Direct] {
        let o: Vec<f64> = res.rows.iter().filter(|r| r.scheme == s).map(|r| r.outage_prob).collect();
        assert!(o.windows(2).all(|w| w[1] >= w[0]), "{s:?}: {o:?}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let cfg = small(ExperimentKind::RateVsAntennas);
    emit_csv(&run_experiment(&cfg).unwrap(), &a).unwrap();
    emit_csv(&run_experiment(&cfg).unwrap(), &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn unwritable_path_is_an_io_error_naming_the_path() {
    let res = run_experiment(&ExperimentConfig { trials: 1, rdmin_grid: "0".into(), ..Default::default() }).unwrap();
    let path = std::path::Path::new("/nonexistent-dir/out.csv");
    match emit_csv(&res, path) {
        Err(e @ HarnessError::Io { .. }) => assert!(e.to_string().contains("/nonexistent-dir/out.csv")),
        other => panic!("expected I/O error, got {other:?}"),
    }
}

#[test]
fn invalid_configs_are_rejected() {
    for text in ["trials = 0", "schemes = []", "rdmin_grid = \"2:1:0.5\"", "m = 1", "antennas = [0]\nkind = \"rate_vs_antennas\""] {
        let err = ExperimentConfig::from_toml_str(text).and_then(|c| c.validate());
        assert!(matches!(err, Err(HarnessError::Config(_))), "{text}");
    }
    let fig2_antennas = ExperimentConfig { kind: ExperimentKind::RateVsAntennas, fig2: true, ..Default::default() };
    assert!(fig2_antennas.validate().is_err());
}

#[test]
fn config_hash_tracks_content() {
    let a = ExperimentConfig::default();
    let b = ExperimentConfig { base_seed: 1, ..Default::default() };
    assert_eq!(a.config_hash(), ExperimentConfig::default().config_hash());
    assert_ne!(a.config_hash(), b.config_hash());
    assert_eq!(a.config_hash().len(), 64);
}
