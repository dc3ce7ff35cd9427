use wpcn_core::experiments::*;
use wpcn_core::{EhModel, Method, Scheme};

fn small_sweep(trials: u64) -> SweepSpec {
    SweepSpec {
        parameter: SweptParameter::PtDbm,
        grid: vec![-30.0, -20.0, -10.0],
        base: ExperimentConfig::default(),
        targets: vec![
            TargetSpec::single(Scheme::Sbs, 1, EhModel::NonLinear),
            TargetSpec::single(Scheme::Mms, 2, EhModel::Linear),
        ],
        methods: vec![Method::Analytic, Method::MonteCarlo],
        mc_trials: Some(trials),
    }
}

fn csv_bytes(rows: &[Row]) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(rows, &mut out).unwrap();
    out
}

#[test]
fn csv_header_is_the_fixed_schema() {
    let bytes = csv_bytes(&[]);
    assert_eq!(
        String::from_utf8(bytes).unwrap().trim_end(),
        "scheme,k,j,M,pt_dbm,t1,q_db,sigma_n_dbm,sigma_e2,model,method,x_threshold,outage,stderr"
    );
}

#[test]
fn csv_round_trips() {
    let res = run_sweep(&small_sweep(5_000)).unwrap();
    assert_eq!(res.rows.len(), 12);
    let bytes = csv_bytes(&res.rows);
    let back = read_csv(bytes.as_slice()).unwrap();
    assert_eq!(back, res.rows);
}

#[test]
fn reruns_and_worker_caps_are_byte_identical() {
    let spec = small_sweep(20_000);
    let a = with_workers(Some(1), || run_sweep(&spec)).unwrap().unwrap();
    let b = with_workers(Some(3), || run_sweep(&spec)).unwrap().unwrap();
    let c = run_sweep(&spec).unwrap();
    assert_eq!(csv_bytes(&a.rows), csv_bytes(&b.rows));
    assert_eq!(csv_bytes(&a.rows), csv_bytes(&c.rows));
}

#[test]
fn config_round_trips_through_toml() {
    let text = r#"
scheme = "ibs"
k = 3
model = "linear"
method = "mc"
pt_dbm = -25.0
m = 12
trials = 1000
seed = 42

[sweep]
parameter = "t1"
start = 0.1
stop = 0.9
step = 0.2
"#;
    let cfg = ExperimentConfig::from_toml(text).unwrap();
    assert_eq!(cfg.scheme, Scheme::Ibs);
    assert_eq!(cfg.model, EhModel::Linear);
    assert_eq!(cfg.method, Method::MonteCarlo);
    let grid = cfg.sweep.as_ref().unwrap().grid().unwrap();
    assert_eq!(grid.len(), 5);
    assert!((grid[4] - 0.9).abs() < 1e-12);
    let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
    assert_eq!(again, cfg);
    assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
}

#[test]
fn overrides_take_precedence() {
    let mut cfg = ExperimentConfig::default();
    cfg.apply(&ConfigOverrides {
        k: Some(4),
        pt_dbm: Some(5.0),
        ..Default::default()
    });
    assert_eq!(cfg.k, 4);
    assert_eq!(cfg.pt_dbm, 5.0);
    assert_eq!(cfg.m, ExperimentConfig::default().m);
}

#[test]
fn bad_rows_are_reported_not_fatal() {
    let mut spec = small_sweep(1_000);
    spec.parameter = SweptParameter::K;
    spec.grid = vec![1.0, 2.0, 9.0];
    spec.targets.truncate(1);
    spec.methods = vec![Method::Analytic];
    let res = run_sweep(&spec).unwrap();
    assert_eq!(res.rows.len(), 3);
    assert_eq!(res.errors.len(), 1);
    assert_eq!(res.errors[0].row, 2);
    assert!(res.rows[2].outage.is_none());
}

#[test]
fn analytic_rejects_imperfect_csi() {
    let cfg = ExperimentConfig {
        sigma_e2: 0.1,
        ..Default::default()
    };
    let t = TargetSpec::single(Scheme::Sbs, 1, EhModel::NonLinear);
    assert!(evaluate(&cfg, &t, Method::Analytic, 0).is_err());
    assert!(evaluate(&cfg, &t, Method::MonteCarlo, 2_000).is_ok());
}

#[test]
fn compare_flags_real_disagreement() {
    let mut spec = small_sweep(50_000);
    spec.methods = vec![Method::Analytic, Method::MonteCarlo];
    let ok = compare_methods(&CompareSpec {
        sweep: spec.clone(),
        tolerance: 5e-3,
        z_limit: 3.0,
    })
    .unwrap();
    assert!(ok.all_pass, "{}", ok.summary());
    spec.methods = vec![Method::Analytic, Method::HighSnr];
    let bad = compare_methods(&CompareSpec {
        sweep: spec,
        tolerance: 1e-6,
        z_limit: 3.0,
    })
    .unwrap();
    assert!(!bad.all_pass);
}

#[test]
fn figure_dataset_is_written_with_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let opts = FigureOptions { mc_trials: 0, seed: 1 };
    let path = reproduce_figure(FigureId::Fig3a, dir.path(), &opts).unwrap();
    let rows = read_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.m == 10 && r.method != Method::MonteCarlo));
    let ks: std::collections::BTreeSet<usize> = rows.iter().map(|r| r.k).collect();
    assert_eq!(ks.len(), 10);
    assert!(io::metadata_path(&path).exists());
}

#[test]
fn figure_ids_parse() {
    for (s, id) in [
        ("fig2a", FigureId::Fig2a),
        ("5", FigureId::Fig5),
        ("fig6", FigureId::Fig6),
    ] {
        assert_eq!(s.parse::<FigureId>().unwrap(), id);
    }
    assert!("fig9".parse::<FigureId>().is_err());
}

#[test]
fn optimal_t1_is_a_minimum() {
    let cfg = ExperimentConfig::default();
    let spec = TargetSpec::single(Scheme::Ibs, 2, EhModel::NonLinear).scheme_spec();
    let p = cfg.params().unwrap();
    let opt = find_optimal_t1(&spec, &p, 1e-5).unwrap();
    assert!(opt.unimodal);
    for dt in [-0.05, -0.01, 0.01, 0.05] {
        let v = optimize::outage_at_t1(&spec, &p, opt.t_star + dt).unwrap();
        assert!(v >= opt.outage);
    }
}
