use std::f64::consts::TAU;
use std::process::{Command, Output};

use serde_json::Value;

fn gerstner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gerstner"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("valid JSON")
}

/// Numeric rows of a CSV document, after checking its header.
fn csv_rows(text: &str, header: &str) -> Vec<Vec<f64>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(header));
    lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn speed_c(out: &Output) -> f64 {
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix("c = "))
        .expect("c line")
        .parse()
        .unwrap()
}

#[test]
fn speed_classical_value_to_twelve_decimals() {
    let out = gerstner(&["speed", "--k", "1", "--omega", "0", "--g", "9.8"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("c = 3.130495168500\n"));
}

#[test]
fn speed_with_rotation_matches_bisection() {
    let out = gerstner(&["speed", "--k", "0.5"]);
    assert_eq!(code(&out), 0);
    assert!((speed_c(&out) - 4.42704).abs() < 5e-6);
    let j = json(&gerstner(&["speed", "--k", "0.5", "--format", "json"]));
    assert!(j["residual"].as_f64().unwrap() <= 1e-12 * 9.8);
}

#[test]
fn invalid_parameter_exits_two() {
    let out = gerstner(&["speed", "--k", "-1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("wavenumber"));
    assert_eq!(code(&gerstner(&["profile", "--b0", "0.5"])), 2);
    assert_eq!(code(&gerstner(&["speed", "--format", "svg"])), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&gerstner(&["speed", "--bogus", "1"])), 2);
    assert_eq!(code(&gerstner(&["nonsense"])), 2);
}

#[test]
fn verify_default_passes() {
    let out = gerstner(&["verify"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["overall_pass"], Value::Bool(true));
    let names: Vec<_> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap().to_owned())
        .collect();
    assert_eq!(
        names,
        [
            "momentum",
            "divergence",
            "vorticity",
            "kinematic_bc",
            "dynamic_bc"
        ]
    );
    for key in ["params", "fd_step", "grid"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn verify_zero_tolerance_fails() {
    let out = gerstner(&["verify", "--tol", "0"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["overall_pass"], Value::Bool(false));
}

#[test]
fn verify_classical_limit_passes() {
    assert_eq!(code(&gerstner(&["verify", "--omega", "0"])), 0);
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = dir.path().join("unknown.toml");
    std::fs::write(&unknown, "k = 1.0\nwavenumber = 2.0\n").unwrap();
    assert_eq!(
        code(&gerstner(&[
            "verify",
            "--config",
            unknown.to_str().unwrap()
        ])),
        2
    );

    let broken = dir.path().join("broken.toml");
    std::fs::write(&broken, "k = = 1\n").unwrap();
    assert_eq!(
        code(&gerstner(&["verify", "--config", broken.to_str().unwrap()])),
        2
    );

    let missing = dir.path().join("missing.toml");
    assert_eq!(
        code(&gerstner(&[
            "verify",
            "--config",
            missing.to_str().unwrap()
        ])),
        2
    );
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "k = 0.5\nomega = 0.0\n").unwrap();
    let path = path.to_str().unwrap();

    let from_file = speed_c(&gerstner(&["speed", "--config", path]));
    assert!((from_file - (9.8f64 / 0.5).sqrt()).abs() < 1e-11);
    let overridden = speed_c(&gerstner(&["speed", "--config", path, "--k", "2"]));
    assert!((overridden - (9.8f64 / 2.0).sqrt()).abs() < 1e-11);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let out = gerstner(&["profile", "--nx", "16", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, stdout(&gerstner(&["profile", "--nx", "16"])));
}

#[test]
fn profile_height_is_twice_the_radius() {
    let out = gerstner(&["profile", "--nx", "64"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&stdout(&out), "x,eta");
    assert_eq!(rows.len(), 64);
    let max = rows.iter().map(|r| r[1]).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r[1]).fold(f64::INFINITY, f64::min);
    assert!(((max - min) - 2.0 * (-0.1f64).exp()).abs() < 1e-9);
    assert!(rows.iter().all(|r| (0.0..TAU).contains(&r[0])));
}

#[test]
fn profile_output_is_deterministic_and_round_trips() {
    let args = ["profile", "--k", "0.7", "--t", "1.3", "--nx", "50"];
    let first = stdout(&gerstner(&args));
    assert_eq!(first, stdout(&gerstner(&args)));
    assert!(!first.contains('\r'));

    let rows = csv_rows(&first, "x,eta");
    let mut re_emitted = String::from("x,eta\n");
    for r in rows {
        let cells: Vec<String> = r
            .iter()
            .map(|v| ryu::Buffer::new().format(*v).to_owned())
            .collect();
        re_emitted.push_str(&cells.join(","));
        re_emitted.push('\n');
    }
    assert_eq!(re_emitted, first);
}

/// Elevation at x = 0 when the crest sits `d` to the left of it.
fn cycloid_elevation_right_of_crest(d: f64) -> f64 {
    let c = speed_c(&gerstner(&["speed"]));
    // Crest at x = ct (mod 2π): one period minus d/c puts it at −d.
    let t = TAU / c - d / c;
    let out = gerstner(&[
        "profile",
        "--b0",
        "0",
        "--nx",
        "1",
        "--t",
        &t.to_string(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    json(&out)["samples"][0][1].as_f64().unwrap()
}

#[test]
fn cycloid_slope_diverges_at_the_crest() {
    let crest = json(&gerstner(&[
        "profile", "--b0", "0", "--nx", "2", "--format", "json",
    ]));
    assert_eq!(crest["kind"], "cycloid");
    let top = crest["samples"][0][1].as_f64().unwrap();
    assert!((top - 1.0).abs() < 1e-12);

    let d = 1e-10;
    let slope = (top - cycloid_elevation_right_of_crest(d)) / d;
    assert!(slope > 1e3, "slope {slope}");
}

#[test]
fn profile_svg_has_polyline_and_guides() {
    let out = gerstner(&["profile", "--format", "svg", "--nx", "32"]);
    assert_eq!(code(&out), 0);
    let svg = stdout(&out);
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 1);
    assert!(svg.contains("crest") && svg.contains("trough"));
}

#[test]
fn field_rows_match_physical_expectations() {
    let out = gerstner(&["field", "--nx", "8", "--nz", "5", "--depth", "20"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&stdout(&out), "x,z,u,w,p,gamma");
    assert_eq!(rows.len(), 40);
    for column in rows.chunks(5) {
        let top = &column[0];
        assert!(
            (top[4] - 101325.0).abs() < 1.0,
            "surface pressure {}",
            top[4]
        );
        let bottom = &column[4];
        assert!(bottom[2].hypot(bottom[3]) < 1e-7);
        assert!(column.iter().all(|r| r[5] < 0.0));
        assert!(column.windows(2).all(|w| w[1][1] < w[0][1]));
    }
}

#[test]
fn field_rejects_svg() {
    assert_eq!(code(&gerstner(&["field", "--format", "svg"])), 2);
}

#[test]
fn trace_recovers_the_orbit() {
    let out = gerstner(&["trace", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let j = json(&out);
    let fit = &j["fit"];
    let radius = (-1.1f64).exp();
    assert!((fit["radius"].as_f64().unwrap() - radius).abs() < 1e-9);
    assert!(fit["max_deviation"].as_f64().unwrap() < 1e-9 * radius);
    assert!((fit["center"][1].as_f64().unwrap() + 1.1).abs() < 1e-9);
    assert_eq!(j["clockwise"], Value::Bool(true));
    assert_eq!(j["samples"].as_array().unwrap().len(), 2001);
}

#[test]
fn trace_csv_has_time_and_position() {
    let out = gerstner(&["trace", "--steps", "100"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&stdout(&out), "t,x,z");
    assert_eq!(rows.len(), 101);
    assert!(String::from_utf8_lossy(&out.stderr).contains("max_deviation"));
}

#[test]
fn trace_exit_codes() {
    assert_eq!(code(&gerstner(&["trace", "--tol", "0"])), 1);
    assert_eq!(code(&gerstner(&["trace", "--dt", "1"])), 2);
    assert_eq!(code(&gerstner(&["trace", "--b", "0.5"])), 2);
}
