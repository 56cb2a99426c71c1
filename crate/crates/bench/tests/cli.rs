use std::process::{Command, Output};

use elasticity_bench::{emit_report, run_table_experiment, BenchResult, ExperimentConfig, ReportFormat};
use elasticity_core::fem::ElementPair;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elasticity-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn csv_has_one_row_per_cell() {
    let o = run(&["bench", "--levels", "2..3", "--nu", "0.25,0.4,0.4999", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "pair,level,nu,lambda,iterations,condition,l2_error,h1_error,status");
    assert_eq!(rows.len() - 1, 2 * 2 * 3);
    assert!(rows[1..].iter().all(|r| r.ends_with(",ok")));
}

#[test]
fn markdown_mirrors_table_layout() {
    let o = run(&["bench", "--pair", "p2p0", "--levels", "2,3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("| h=2^-L | ν = 0.25 | ν = 0.4 | ν = 0.49 | ν = 0.499 | ν = 0.4999 |"));
    assert_eq!(text.matches("### ").count(), 2);
    assert!(text.contains("| L=3 |"));
    assert!(!text.contains("P2×P1"));
}

#[test]
fn reference_cell_iterations() {
    let o = run(&["bench", "--pair", "p2p0", "--levels", "3", "--nu", "0.499", "--format", "csv"]);
    let text = stdout(&o);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let iterations: usize = fields[4].parse().unwrap();
    // reference value 7
    assert!(iterations.abs_diff(7) <= 2, "{iterations}");
}

#[test]
fn output_is_deterministic() {
    let args = ["bench", "--levels", "2", "--format", "csv"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
    let args = ["bench", "--levels", "2", "--format", "md"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}

#[test]
fn json_round_trips() {
    let config = ExperimentConfig {
        pairs: vec![ElementPair::P2P1],
        levels: vec![2],
        nu_values: vec![0.3, 0.49],
        ..ExperimentConfig::default()
    };
    let result = run_table_experiment(&config).unwrap();
    let json = emit_report(&result, ReportFormat::Json).unwrap();
    let back: BenchResult = serde_json::from_str(&json).unwrap();
    assert_eq!(back, result);
    assert!(back.cells.iter().all(|c| c.residual_history.len() == c.iterations.unwrap() + 1));
}

#[test]
fn lambda_follows_poisson_ratio() {
    let config = ExperimentConfig {
        pairs: vec![ElementPair::P2P0],
        levels: vec![1],
        ..ExperimentConfig::default()
    };
    let result = run_table_experiment(&config).unwrap();
    let lambdas: Vec<f64> = result.cells.iter().map(|c| c.lambda).collect();
    for (got, want) in lambdas.iter().zip([0.5, 2.0, 24.5, 249.5, 2499.5]) {
        approx::assert_relative_eq!(*got, want, max_relative = 1e-12);
    }
}

#[test]
fn config_errors_exit_with_code_two() {
    for args in [
        vec!["bench", "--nu", "0.5"],
        vec!["bench", "--levels", "6"],
        vec!["bench", "--format", "xml"],
        vec!["bench", "--pair", "p3p1"],
        vec!["bench", "--tol", "2"],
        vec!["mesh-info", "--levels", "9"],
        vec!["no-such-command"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn level_guard_can_be_raised() {
    let o = run(&["mesh-info", "--levels", "6", "--max-level-guard", "6"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("6 "));
}

#[test]
fn mesh_info_counts() {
    let o = run(&["mesh-info", "--levels", "2"]);
    let row: Vec<String> = stdout(&o).lines().nth(1).unwrap().split_whitespace().map(String::from).collect();
    assert_eq!(row, ["2", "0.25", "25", "32", "56", "162", "98", "32", "25"]);
}

#[test]
fn fourier_check_passes() {
    let o = run(&["fourier-check", "--seed", "3", "--modes", "200"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("d=2: modes 200"));
    assert!(text.trim_end().ends_with("PASS"));
}

#[test]
fn verify_passes_and_writes_file() {
    let path = std::env::temp_dir().join(format!("elasticity-verify-{}.txt", std::process::id()));
    let o = run(&["verify", "--seed", "5", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(!text.contains("[FAIL]"));
    assert!(text.contains("0 failed (seed 5)"));
}
