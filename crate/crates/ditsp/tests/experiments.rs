use ditsp::harness::{fit_scaling, run_experiment, ExperimentConfig, ExperimentKind, Rows};
use ditsp::planners::Algo;
use ditsp::{VehicleParams, Workspace};

#[test]
fn config_round_trips_through_json() {
    let cfg = ExperimentConfig::new(ExperimentKind::DtrpSweep, vec![5.0, 10.0], 2, 1, Workspace::unit(2), VehicleParams::new(0.1, 1.0).unwrap());
    let text = serde_json::to_string(&cfg).unwrap();
    assert!(text.contains("\"dtrp_sweep\""));
    let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(back.grid, cfg.grid);
    let minimal: ExperimentConfig = serde_json::from_str(
        r#"{"kind":"geometry_audit","grid":[0.2],"trials":1,"master_seed":3,
            "workspace":{"w":1.0,"h":1.0,"d":null},"params":{"r_vel":1.0,"r_ctr":1.0}}"#,
    )
    .unwrap();
    assert_eq!(minimal.workers, 1);
}

#[test]
fn geometry_audit_rows() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::GeometryAudit, vec![0.2, 1.0], 1, 3, Workspace::unit(2), VehicleParams::new(1.0, 1.0).unwrap());
    let dir = tempfile::tempdir().unwrap();
    cfg.output = Some(dir.path().join("g.csv"));
    let rep = run_experiment(&cfg).unwrap();
    let Rows::Geometry(rows) = &rep.rows else { panic!() };
    for r in rows {
        assert!((r.area_estimate / r.area_exact - 1.0).abs() < 0.01);
        assert_eq!(r.coverage, 1.0);
    }
    let csv = std::fs::read_to_string(cfg.output.unwrap()).unwrap();
    assert!(csv.starts_with("ell_over_rho,seed,width,area_exact,area_estimate,coverage\n"));
}

#[test]
fn dtrp_sweep_rows() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::DtrpSweep, vec![10.0, 20.0], 2, 1, Workspace::unit(2), VehicleParams::new(0.1, 1.0).unwrap());
    cfg.horizon_sweeps = 30;
    let rep = run_experiment(&cfg).unwrap();
    let Rows::Dtrp(rows) = &rep.rows else { panic!() };
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| !r.divergent_flag && r.policy == "bta"));
    let fit = rep.fit.unwrap();
    assert!(fit.slope > 1.0, "{}", fit.slope);
}

#[test]
fn small_grid_slope() {
    let f = fit_scaling(Algo::Recbta, Workspace::unit(2), VehicleParams::new(0.1, 1.0).unwrap(), &[1000, 4000, 16000], 3, 2).unwrap();
    assert!((0.5..0.85).contains(&f.slope), "{}", f.slope);
    assert!((0.0..=1.0).contains(&f.r2));
    assert_eq!(f.points.len(), 3);
}
