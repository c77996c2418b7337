//! Output-file contracts of the experiment harness and its command-line
//! front end: header layout, CSV shapes, snapshot format, byte-identical
//! reruns, and process exit codes.

use acsplit::harness::{
    run_experiment, ExperimentKind, ExperimentSpec, ScalarPotential, PRNG_NAME, VERSION,
};
use acsplit::problems::seven_circles;
use acsplit::{Boundary, Grid, DOMAIN_AREA};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn tiny_spec(experiment: ExperimentKind, out_dir: PathBuf) -> ExperimentSpec {
    ExperimentSpec {
        experiment,
        grid_n: 16,
        boundary: Boundary::Neumann,
        eps: 0.1,
        theta: 0.25,
        theta_c: 1.0,
        t_final: 0.02,
        tau: 1e-3,
        tau_min: 1e-3,
        tau_max: 5e-3,
        alpha: 100.0,
        n_list: vec![4, 8],
        seed: 3,
        snapshot_times: Vec::new(),
        record_every: 1,
        potential: ScalarPotential::Polynomial,
        timing: false,
        out_dir,
    }
}

/// Splits a harness file into (`#key=value` headers in order, body lines).
fn split_file(path: &Path) -> (Vec<(String, String)>, Vec<String>) {
    let text = fs::read_to_string(path).unwrap();
    let mut headers = Vec::new();
    let mut body = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest.split_once('=').expect("header line without '='");
            headers.push((k.to_string(), v.to_string()));
        } else {
            body.push(line.to_string());
        }
    }
    (headers, body)
}

fn header_value<'a>(headers: &'a [(String, String)], key: &str) -> &'a str {
    &headers.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("missing #{key}")).1
}

#[test]
fn converge_csv_layout_and_rates() {
    let dir = tempfile::tempdir().unwrap();
    let spec = tiny_spec(ExperimentKind::ConvergePoly, dir.path().to_path_buf());
    run_experiment(&spec).unwrap();

    let path = dir.path().join("converge-poly.csv");
    let (headers, body) = split_file(&path);

    let keys: Vec<&str> = headers.iter().map(|(k, _)| k.as_str()).collect();
    let want_keys = [
        "version", "experiment", "prng", "seed", "grid", "boundary", "potential", "plan", "eps",
        "theta", "theta_c", "t_final", "tau", "tau_min", "tau_max", "alpha", "n_list",
        "record_every", "snapshot_times", "timing",
    ];
    assert_eq!(keys, want_keys, "header keys out of contract");

    assert_eq!(header_value(&headers, "version"), VERSION);
    assert_eq!(header_value(&headers, "experiment"), "converge-poly");
    assert_eq!(header_value(&headers, "prng"), PRNG_NAME);
    assert_eq!(header_value(&headers, "seed"), "3");
    assert_eq!(header_value(&headers, "grid"), "16x16");
    assert_eq!(header_value(&headers, "boundary"), "neumann");
    assert_eq!(header_value(&headers, "potential"), "polynomial");
    assert_eq!(header_value(&headers, "n_list"), "4,8");
    assert_eq!(header_value(&headers, "timing"), "off");
    assert!(header_value(&headers, "plan").starts_with("random-normalized"));
    assert_eq!(header_value(&headers, "eps"), "1.0000000000000001e-1");

    assert_eq!(body[0], "n,tau_max,h1_error,rate");
    assert_eq!(body.len(), 3, "expected a column line plus one row per n");
    let row0: Vec<&str> = body[1].split(',').collect();
    let row1: Vec<&str> = body[2].split(',').collect();
    assert_eq!(row0[0], "4");
    assert_eq!(row1[0], "8");
    assert!(row0[3].is_empty(), "first row must leave the rate column empty");
    let e0: f64 = row0[2].parse().unwrap();
    let e1: f64 = row1[2].parse().unwrap();
    let rate: f64 = row1[3].parse().unwrap();
    println!("tiny sweep: e(4)={e0:.3e}, e(8)={e1:.3e}, rate={rate:.3}");
    assert!(e0 > e1 && e1 > 0.0, "errors must decrease and stay positive");
    let tau0: f64 = row0[1].parse().unwrap();
    let tau1: f64 = row1[1].parse().unwrap();
    let recomputed = (e0 / e1).ln() / (tau0 / tau1).ln();
    assert!((rate - recomputed).abs() <= 1e-12, "rate column inconsistent with its own rows");
}

#[test]
fn reruns_are_byte_identical_with_timing_off() {
    for kind in [ExperimentKind::ConvergePoly, ExperimentKind::Simulate, ExperimentKind::Ternary] {
        let (dir_a, dir_b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        for dir in [&dir_a, &dir_b] {
            let mut spec = tiny_spec(kind, dir.path().to_path_buf());
            if kind == ExperimentKind::Ternary {
                spec.boundary = Boundary::Periodic;
                spec.eps = 0.05;
            }
            spec.snapshot_times = vec![0.0, 0.02];
            run_experiment(&spec).unwrap();
        }
        let mut names: Vec<String> = fs::read_dir(dir_a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for name in &names {
            let a = fs::read(dir_a.path().join(name)).unwrap();
            let b = fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{}: rerun of {name} is not byte-identical", kind.name());
        }
    }
}

#[test]
fn simulate_trace_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = tiny_spec(ExperimentKind::Simulate, dir.path().to_path_buf());
    spec.snapshot_times = vec![0.01, 0.0];
    spec.record_every = 2;
    run_experiment(&spec).unwrap();

    let (headers, body) = split_file(&dir.path().join("simulate.csv"));
    assert!(header_value(&headers, "plan").starts_with("adaptive("));
    assert_eq!(header_value(&headers, "snapshot_times"), "1.0000000000000000e-2,0.0000000000000000e0");
    assert_eq!(body[0], "t,tau,energy,max_norm,wall_seconds");
    let rows: Vec<Vec<f64>> = body[1..]
        .iter()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert!(rows.len() >= 3, "expected an initial row plus recorded steps");
    assert_eq!(rows[0][0], 0.0, "first row must be the initial state");
    assert_eq!(rows[0][1], 0.0, "initial row carries tau=0");
    for w in rows.windows(2) {
        assert!(w[1][0] > w[0][0], "times must increase strictly");
        assert!(w[1][2] <= w[0][2] + 1e-10, "recorded energy must not grow");
    }
    let last = rows.last().unwrap();
    assert!((last[0] - 0.02).abs() <= 1e-15, "trace must land on the horizon");
    assert!(rows.iter().all(|r| r[4] == 0.0), "timing off must zero wall_seconds");

    // Snapshots are indexed in sorted time order; index 0 is t=0 and must
    // reproduce the initial field exactly through the 17-digit format.
    let text = fs::read_to_string(dir.path().join("simulate_snapshot_0.txt")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "16 16 neumann");
    let grid = Grid::new(16, 16, Boundary::Neumann).unwrap();
    let u0 = seven_circles(grid, spec.eps);
    let mut idx = 0;
    for line in lines {
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().unwrap();
            assert_eq!(v.to_bits(), u0.data()[idx].to_bits(), "snapshot does not round-trip node {idx}");
            idx += 1;
        }
    }
    assert_eq!(idx, grid.len());
    assert!(dir.path().join("simulate_snapshot_1.txt").exists());
    assert!(!dir.path().join("simulate_snapshot_2.txt").exists());
}

#[test]
fn timing_switch_populates_wall_seconds() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = tiny_spec(ExperimentKind::Simulate, dir.path().to_path_buf());
    spec.timing = true;
    run_experiment(&spec).unwrap();
    let (headers, body) = split_file(&dir.path().join("simulate.csv"));
    assert_eq!(header_value(&headers, "timing"), "on");
    let wall: Vec<f64> =
        body[1..].iter().map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    assert!(wall.last().unwrap() > &0.0, "timing on must record positive wall time");
    for w in wall.windows(2) {
        assert!(w[1] >= w[0], "wall clock must be nondecreasing");
    }
}

#[test]
fn adapt_compare_with_coincident_plans_reports_zero_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = tiny_spec(ExperimentKind::AdaptCompare, dir.path().to_path_buf());
    spec.tau_max = spec.tau_min; // adaptive plan degenerates to the uniform one
    run_experiment(&spec).unwrap();

    let (headers, body) = split_file(&dir.path().join("adapt-compare.csv"));
    assert!(header_value(&headers, "plan").contains(" vs adaptive("));
    assert_eq!(body[0], "method,steps,wall_seconds,e_rel");
    let uniform: Vec<&str> = body[1].split(',').collect();
    let adaptive: Vec<&str> = body[2].split(',').collect();
    assert_eq!(uniform[0], "uniform");
    assert_eq!(adaptive[0], "adaptive");
    assert_eq!(uniform[1], adaptive[1], "degenerate plans must take the same step count");
    assert_eq!(uniform[3], "0.0000000000000000e0");
    assert_eq!(adaptive[3], "0.0000000000000000e0", "coincident runs must agree bit for bit");
}

#[test]
fn ternary_csv_reports_conservation() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = tiny_spec(ExperimentKind::Ternary, dir.path().to_path_buf());
    spec.boundary = Boundary::Periodic;
    spec.eps = 0.05;
    spec.seed = 5;
    spec.snapshot_times = vec![0.02];
    run_experiment(&spec).unwrap();

    let text = fs::read_to_string(dir.path().join("ternary.csv")).unwrap();
    let (headers, body) = split_file(&dir.path().join("ternary.csv"));
    assert_eq!(header_value(&headers, "potential"), "ternary-conservative");
    assert_eq!(header_value(&headers, "boundary"), "periodic");
    assert_eq!(body[0], "t,tau,energy,mass_1,mass_2,mass_3,hyperplane_max,wall_seconds");
    for line in &body[1..] {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(cols.len(), 8);
        let mass_sum = cols[3] + cols[4] + cols[5];
        assert!((mass_sum - DOMAIN_AREA).abs() <= 1e-10 * DOMAIN_AREA, "phase masses must tile the domain: {mass_sum}");
        assert!(cols[6] <= 1e-11, "hyperplane_max too large: {:e}", cols[6]);
    }
    // Conservation summaries are appended as trailing header lines.
    let drift: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("#max_mass_drift="))
        .expect("missing #max_mass_drift")
        .parse()
        .unwrap();
    let hyper: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("#max_hyperplane_violation="))
        .expect("missing #max_hyperplane_violation")
        .parse()
        .unwrap();
    println!("ternary tiny run: mass drift {drift:.3e}, hyperplane {hyper:.3e}");
    assert!(drift <= 1e-12, "mass drift beyond rounding: {drift:e}");
    assert!(hyper <= 1e-12, "hyperplane violation beyond rounding: {hyper:e}");

    let snap = fs::read_to_string(dir.path().join("ternary_snapshot_0.txt")).unwrap();
    assert!(snap.starts_with("16 16 periodic"));
}

#[test]
fn converge_log_uses_the_logarithmic_well() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = tiny_spec(ExperimentKind::ConvergeLog, dir.path().to_path_buf());
    spec.eps = 0.05;
    run_experiment(&spec).unwrap();
    let (headers, body) = split_file(&dir.path().join("converge-log.csv"));
    assert_eq!(header_value(&headers, "experiment"), "converge-log");
    assert_eq!(header_value(&headers, "potential"), "logarithmic");
    assert_eq!(body.len(), 3);
    let e0: f64 = body[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!(e0 > 0.0);
}

// ---------------------------------------------------------------------------
// Command-line front end
// ---------------------------------------------------------------------------

fn harness_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ac-harness"))
}

#[test]
fn cli_tiny_run_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = harness_cmd()
        .args(["--experiment", "converge-poly", "--grid", "8", "--t-final", "0.01"])
        .args(["--tau", "1e-3", "--n-list", "2,4", "--seed", "3"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("converge-poly.csv").exists());
}

#[test]
fn cli_applies_per_experiment_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = harness_cmd()
        .args(["--experiment", "ternary", "--grid", "8", "--t-final", "0.01"])
        .args(["--tau-max", "5e-3"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let (headers, _) = split_file(&dir.path().join("ternary.csv"));
    assert_eq!(header_value(&headers, "boundary"), "periodic", "ternary must default to periodic");
    assert_eq!(header_value(&headers, "eps"), "5.0000000000000003e-2");
}

#[test]
fn cli_rejects_unusable_command_lines_with_exit_2() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["--experiment", "simulate", "--eps=-1"],
        vec!["--experiment", "simulate", "--grid", "7"],
        vec!["--experiment", "simulate", "--tau-min", "1", "--tau-max", "0.5"],
        vec!["--experiment", "simulate", "--t-final", "0.01", "--snapshot-times", "0.5"],
        vec!["--experiment", "converge-poly", "--n-list", "0"],
        vec!["--no-such-flag"],
        vec!["--experiment", "nonsense"],
    ];
    for args in cases {
        let out = harness_cmd().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "args {args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty(), "args {args:?} must explain the rejection");
    }
}

#[test]
fn cli_reports_runtime_failures_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    // τ = 1 violates the implicit stage monotonicity bound for the
    // logarithmic well, so the reference run fails after parsing succeeds.
    let out = harness_cmd()
        .args(["--experiment", "converge-log", "--grid", "16", "--tau", "1", "--t-final", "1"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(!out.stderr.is_empty(), "runtime failure must be reported on stderr");
}
