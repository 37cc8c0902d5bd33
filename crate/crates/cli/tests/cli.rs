use std::path::Path;
use std::process::Command;

use qheat_cli::config::{Grid, SettingConfig};
use qheat_cli::{
    execute, run_decompose, run_flux_sweep, run_geometric, run_lambda_trace, run_phi0_profile,
    ExperimentConfig, ExperimentKind,
};

fn csv_of(kind: ExperimentKind, cfg: &ExperimentConfig) -> String {
    let mut buf = Vec::new();
    execute(kind, cfg, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn qheat(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qheat"))
        .args(args)
        .current_dir(dir)
        .env_remove("QHEAT_THREADS")
        .output()
        .unwrap()
}

#[test]
fn sweep_rows_are_ordered_frequency_first() {
    let cfg = ExperimentConfig {
        omega_thz_sweep: Some(Grid(1.0, 3.0, 3)),
        beta_s: vec![0.5, 3.0],
        ..Default::default()
    };
    let rows = run_flux_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 9);
    let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.omega_thz, r.beta_s)).collect();
    let beta0 = rows[0].beta_s;
    assert!((beta0 - 1.0716716602402658).abs() < 1e-15);
    assert_eq!(
        keys,
        vec![
            (1.0, beta0),
            (1.0, 0.5),
            (1.0, 3.0),
            (2.0, beta0),
            (2.0, 0.5),
            (2.0, 3.0),
            (3.0, beta0),
            (3.0, 0.5),
            (3.0, 3.0),
        ]
    );
}

#[test]
fn slow_sweep_end_follows_geometric_reference() {
    let cfg = ExperimentConfig {
        omega_thz_sweep: Some(Grid(0.1, 5.0, 50)),
        beta_s: vec![3.0],
        ..Default::default()
    };
    let rows = run_flux_sweep(&cfg).unwrap();
    let first = &rows[0];
    assert_eq!(first.omega_thz, 0.1);
    assert!(((first.j_hat_per_s - first.j_hat_geo_per_s) / first.j_hat_geo_per_s).abs() < 0.05);
    let last_cold = rows.last().unwrap();
    assert_eq!((last_cold.omega_thz, last_cold.beta_s), (5.0, 3.0));
    assert!(last_cold.j_hat_per_s < last_cold.j_hat_geo_per_s);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let cfg = ExperimentConfig {
        omega_thz_sweep: Some(Grid(0.5, 5.0, 10)),
        beta_s: vec![0.1, 0.5, 3.0],
        ..Default::default()
    };
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let four = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let a = one.install(|| csv_of(ExperimentKind::FluxSweep, &cfg));
    let b = four.install(|| csv_of(ExperimentKind::FluxSweep, &cfg));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 1 + 10 * 4);
}

#[test]
fn decomposition_closes_and_memory_vanishes_from_first_steady_state() {
    let out = run_decompose(&ExperimentConfig::default()).unwrap();
    assert!(out.decomposition.max_identity_residual() < 1e-10);
    assert!(out.decomposition.phi0_profile().iter().all(|&p| p == 0.0));
    assert_eq!(out.trajectory.rho00.len(), 42);

    let profile = run_phi0_profile(&ExperimentConfig::default()).unwrap();
    assert!(profile.iter().all(|&p| p == 0.0));
    let hot = run_phi0_profile(&ExperimentConfig {
        beta_s: vec![0.5],
        include_beta_initial: false,
        ..Default::default()
    })
    .unwrap();
    assert!(hot.iter().any(|&p| p != 0.0));
}

#[test]
fn constant_protocol_has_no_geometric_column() {
    let cfg = ExperimentConfig {
        amplitude_left_k: 0.0,
        amplitude_right_k: 0.0,
        offset_left_k: 150.0,
        offset_right_k: 250.0,
        beta_s: vec![0.8],
        ..Default::default()
    };
    let text = csv_of(ExperimentKind::Decompose, &cfg);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    for row in rows.records() {
        let row = row.unwrap();
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
        assert!(row[5].parse::<f64>().unwrap() < 1e-10);
    }
}

#[test]
fn swap_flag_negates_net_current() {
    let base = ExperimentConfig {
        offset_left_k: 180.0,
        beta_s: vec![0.7],
        include_beta_initial: false,
        ..Default::default()
    };
    let swapped = ExperimentConfig {
        swap_baths: true,
        ..base.clone()
    };
    let a = run_decompose(&base)
        .unwrap()
        .decomposition
        .net_direct_per_s();
    let b = run_decompose(&swapped)
        .unwrap()
        .decomposition
        .net_direct_per_s();
    assert!((a + b).abs() <= 1e-12 * a.abs());
    let ga = run_geometric(&base).unwrap();
    let gb = run_geometric(&swapped).unwrap();
    assert!((ga[0].j2_right + gb[0].j2_right).abs() <= 1e-9 * ga[0].j2_right.abs());
}

#[test]
fn several_periods_repeat_the_schedule() {
    let cfg = ExperimentConfig {
        period_count: 3,
        beta_s: vec![2.0],
        include_beta_initial: false,
        ..Default::default()
    };
    let out = run_decompose(&cfg).unwrap();
    assert_eq!(out.trajectory.n(), 123);
    assert!(out.decomposition.max_identity_residual() < 1e-10);
}

#[test]
fn lambda_trace_reference_settings() {
    let cfg = ExperimentConfig {
        t_grid: Grid(1.164, 1.164, 1),
        ..Default::default()
    };
    let traces = run_lambda_trace(&cfg).unwrap();
    assert_eq!(traces.len(), 3);
    for t in &traces {
        assert!(t.rel_error[0].abs() <= 0.05);
    }
    let text = csv_of(ExperimentKind::LambdaTrace, &cfg);
    assert!(text.starts_with("t_scaled,lambda_t,lambda_markov,rel_error,setting_label\n"));
    assert_eq!(text.lines().count(), 4);

    let custom = ExperimentConfig {
        t_grid: Grid(0.5, 1.0, 2),
        settings: vec![SettingConfig {
            label: "warm".into(),
            t_left_k: 250.0,
            t_right_k: 260.0,
        }],
        ..Default::default()
    };
    let traces = run_lambda_trace(&custom).unwrap();
    assert_eq!(traces[0].setting.label, "warm");
    assert_eq!(traces[0].tau_grid, vec![0.5, 1.0]);
}

#[test]
fn empty_grid_is_a_validation_error() {
    let cfg = ExperimentConfig {
        t_grid: Grid(0.1, 1.0, 0),
        ..Default::default()
    };
    let err = run_lambda_trace(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("t_grid"));
}

#[test]
fn schedule_file_replaces_sampled_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sched.csv");
    std::fs::write(&path, "j,T_L_K,T_R_K\n1,120,300\n2,180,260\n3,240,140\n").unwrap();
    let cfg = ExperimentConfig {
        schedule_csv: Some(path.clone()),
        n: 3,
        beta_s: vec![1.0],
        include_beta_initial: false,
        ..Default::default()
    };
    let out = run_decompose(&cfg).unwrap();
    assert_eq!(out.trajectory.n(), 3);
    assert!(out.decomposition.max_identity_residual() < 1e-10);

    let wrong_n = ExperimentConfig { n: 4, ..cfg };
    let err = run_decompose(&wrong_n).unwrap_err();
    assert!(err.to_string().contains("schedule_csv"));
}

#[test]
fn binary_writes_files_and_reports_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "experiment = \"decompose\"\nbeta_s = [0.5]\ntrajectory_out = \"traj.csv\"\n",
    )
    .unwrap();
    let ok = qheat(
        &["decompose", "--config", "run.toml", "--out", "dec.csv"],
        dir.path(),
    );
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    let dec = std::fs::read_to_string(dir.path().join("dec.csv")).unwrap();
    assert!(dec.starts_with("bath,G1,G2,G3,direct_total,identity_residual\nL,"));
    let traj = std::fs::read_to_string(dir.path().join("traj.csv")).unwrap();
    assert!(traj.starts_with("j,t_ps,rho00,rho_s_j,Lambda_j_per_ps\n0,"));

    let mismatch = qheat(&["geometric", "--config", "run.toml"], dir.path());
    assert_eq!(mismatch.status.code(), Some(2));

    std::fs::write(dir.path().join("bad.toml"), "n = 0\n").unwrap();
    let bad = qheat(&["flux-sweep", "--config", "bad.toml"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("`n`"));

    let missing = qheat(&["flux-sweep", "--config", "nope.toml"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn binary_output_is_byte_identical_between_runs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("sweep.toml"),
        "omega_thz_sweep = [0.1, 5.0, 12]\nbeta_s = [0.1, 0.5, 3.0]\n",
    )
    .unwrap();
    let a = qheat(
        &["flux-sweep", "--config", "sweep.toml", "--threads", "1"],
        dir.path(),
    );
    let b = Command::new(env!("CARGO_BIN_EXE_qheat"))
        .args(["flux-sweep", "--config", "sweep.toml"])
        .current_dir(dir.path())
        .env("QHEAT_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        String::from_utf8(a.stdout).unwrap().lines().count(),
        1 + 12 * 4
    );
}
