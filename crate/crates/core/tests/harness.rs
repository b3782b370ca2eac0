use gsieve::harness::config::{CoeffName, FamilyName};
use gsieve::harness::{
    cmd_duality, cmd_identities, cmd_report, cmd_sweep, run, Command, ExperimentConfig, Format, HarnessError, Table,
    EXIT_BUDGET, EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, SWEEP_COLUMNS,
};
use serde_json::Value;

fn small_sweep() -> ExperimentConfig {
    ExperimentConfig {
        family: vec![FamilyName::Squares],
        q: vec![2, 3, 4],
        n: vec![4.0, 16.0],
        coeffs: vec![CoeffName::AllOnes],
        ..ExperimentConfig::default()
    }
}

fn col(t: &Table, name: &str) -> Vec<Value> {
    let c = t.column(name).unwrap();
    t.rows.iter().map(|r| r[c].clone()).collect()
}

#[test]
fn squares_all_ones_sweep_has_six_rows_within_the_explicit_bound() {
    let out = cmd_sweep(&small_sweep());
    assert_eq!(out.exit_code(), EXIT_OK);
    assert_eq!(out.table.rows.len(), 6);
    assert_eq!(out.table.columns, SWEEP_COLUMNS);
    for r in col(&out.table, "ratio_ls_explicit") {
        assert!(r.as_f64().unwrap() <= 1.0);
    }
    assert!(col(&out.table, "status").iter().all(|s| s == "ok"));
}

#[test]
fn sweep_is_byte_identical_across_runs_and_formats_agree() {
    let cfg = ExperimentConfig {
        coeffs: vec![CoeffName::Random, CoeffName::Extremal],
        seeds: vec![3, 4],
        ..small_sweep()
    };
    let a = cmd_sweep(&cfg).table;
    let b = cmd_sweep(&cfg).table;
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.render(Format::Json), b.render(Format::Json));

    let json: Vec<serde_json::Map<String, Value>> = serde_json::from_str(&a.to_json()).unwrap();
    let csv = Table::from_csv(&a.to_csv()).unwrap();
    assert_eq!(csv.columns, a.columns);
    for (row, obj) in csv.rows.iter().zip(&json) {
        for (name, v) in csv.columns.iter().zip(row) {
            assert_eq!(&obj[name], v, "column {name}");
        }
    }
    let keys: Vec<&String> = json[0].keys().collect();
    assert_eq!(keys, a.columns.iter().collect::<Vec<_>>());
}

#[test]
fn rows_carry_hash_seed_and_version() {
    let cfg = ExperimentConfig {
        coeffs: vec![CoeffName::Random],
        seeds: vec![9],
        ..small_sweep()
    };
    let t = cmd_sweep(&cfg).table;
    assert!(col(&t, "config_hash").iter().all(|h| h.as_str() == Some(cfg.hash().as_str())));
    assert!(col(&t, "seed").iter().all(|s| s.as_u64() == Some(9)));
    assert!(col(&t, "version").iter().all(|v| v.as_str() == Some(env!("CARGO_PKG_VERSION"))));
    assert!(col(&t, "wall_ms").iter().all(|v| v.as_u64() == Some(0)));
}

#[test]
fn extremal_coefficients_beat_all_ones_somewhere() {
    let cfg = ExperimentConfig {
        family: vec![FamilyName::Squares, FamilyName::Power],
        q: vec![2, 3, 4],
        n: vec![4.0, 16.0, 36.0],
        coeffs: vec![CoeffName::AllOnes, CoeffName::Extremal],
        ..ExperimentConfig::default()
    };
    let t = cmd_sweep(&cfg).table;
    let ratios = col(&t, "ratio_huxley");
    // rows alternate all-ones, extremal within each cell
    let wins = ratios
        .chunks(2)
        .filter(|p| p[1].as_f64().unwrap() > p[0].as_f64().unwrap())
        .count();
    assert!(wins > 0);
}

#[test]
fn budget_overrun_marks_rows_skipped() {
    let cfg = ExperimentConfig {
        max_points: 30,
        ..small_sweep()
    };
    let out = cmd_sweep(&cfg);
    assert_eq!(out.exit_code(), EXIT_BUDGET);
    assert_eq!(out.table.rows.len(), 6);
    let status = col(&out.table, "status");
    assert!(status.iter().any(|s| s.as_str().unwrap().starts_with("skipped")));
    assert!(status.iter().any(|s| s == "ok"));
}

#[test]
fn default_identities_pass() {
    let out = cmd_identities(&ExperimentConfig::default());
    assert_eq!(out.exit_code(), EXIT_OK, "{}", out.table.to_csv());
    assert!(col(&out.table, "pass").iter().all(|p| p == "true"));
}

#[test]
fn impossible_tolerance_fails_gracefully() {
    let cfg = ExperimentConfig {
        tol: 1e-18,
        ..ExperimentConfig::default()
    };
    let out = cmd_identities(&cfg);
    assert_eq!(out.exit_code(), EXIT_FAILURE);
    let t = &out.table;
    let row = &t.rows[0];
    assert_eq!(row[0], "poisson_psi1");
    assert_eq!(row[t.column("pass").unwrap()], "false");
    assert!(row[t.column("max_discrepancy").unwrap()].as_f64().unwrap() > 0.0);
}

#[test]
fn config_errors_name_the_key() {
    let cfg = ExperimentConfig {
        q: vec![],
        ..ExperimentConfig::default()
    };
    let err = run(Command::Sweep, &cfg).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_CONFIG);
    assert!(err.to_string().contains("`Q`"));
    assert!(matches!(err, HarnessError::Config(_)));
}

#[test]
fn duality_examples() {
    let out = cmd_duality(&ExperimentConfig::default());
    assert_eq!(out.exit_code(), EXIT_OK);
    assert_eq!(out.table.rows.len(), 10);
    let tiny = ExperimentConfig {
        rows: 1,
        cols: 1,
        matrices: 3,
        ..ExperimentConfig::default()
    };
    let t = cmd_duality(&tiny).table;
    for (f, frob) in col(&t, "forward").iter().zip(col(&t, "frobenius_sq")) {
        assert!((f.as_f64().unwrap() - frob.as_f64().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn report_reads_a_sweep_file() {
    let dir = std::env::temp_dir().join(format!("gsieve-report-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.csv");
    let sweep = cmd_sweep(&small_sweep()).table;
    std::fs::write(&path, sweep.to_csv()).unwrap();
    let cfg = ExperimentConfig {
        input: Some(path.display().to_string()),
        ..ExperimentConfig::default()
    };
    let from_file = cmd_report(&cfg).unwrap();
    let fresh = cmd_report(&small_sweep()).unwrap();
    assert_eq!(from_file.table, fresh.table);
    assert_eq!(from_file.table.rows.len(), 5);
    std::fs::remove_dir_all(dir).unwrap();
}
