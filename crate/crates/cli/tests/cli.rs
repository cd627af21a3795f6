use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wkw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wkw")).args(args).output().expect("run wkw")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("JSON error on stderr")
}

#[test]
fn quick_selftest_passes() {
    let out = wkw(&["selftest", "--quick"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["passed"], Value::Bool(true));
}

#[test]
fn cell_matches_golden() {
    let golden: Value =
        serde_json::from_str(include_str!("golden/cell_P1.6_h0.05.json")).expect("golden parses");
    let out = wkw(&["cell", "--P", "1.6", "--h", "0.05"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let got = stdout_json(&out);
    for key in ["H_bar", "H_bar_star", "x_h", "p_plus_at_x_h", "dHdP"] {
        let (a, b) = (got[key].as_f64().unwrap(), golden[key].as_f64().unwrap());
        assert!((a - b).abs() <= 1e-9, "{key}: {a} vs {b}");
    }
    assert_eq!(got["grid"], golden["grid"]);
    for key in ["b1", "b2", "interpolated_b1", "interpolated_b2"] {
        assert!(got["residuals"][key].as_f64().unwrap() < 1e-9);
    }
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = wkw(&["cell", "--h", "0.1", "--grid", "128", "--out", d.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["cell.csv", "cell.json"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    assert!(a.join("cell.meta.json").exists());
    let csv = std::fs::read_to_string(a.join("cell.csv")).unwrap();
    assert!(csv.starts_with("x,v,v_star,a2,residual_b1,residual_b2\n"));
    assert_eq!(csv.lines().count(), 129);
    assert!(csv.lines().nth(1).unwrap().starts_with("-5.0000000000000000e-1,"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{ "P": 1.6, "hh": 0.1 }"#).unwrap();
    let out = wkw(&["cell", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["exit_code"], 2);
    assert!(err["message"].as_str().unwrap().contains("hh"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{ "potential": { "name": "pendulum", "kappa": 1.0 }, "P": 1.9, "h": 0.2 }"#).unwrap();
    let from_file = stdout_json(&wkw(&["classical", "--config", path.to_str().unwrap()]));
    assert_eq!(from_file["P"], 1.9);
    let overridden = stdout_json(&wkw(&["classical", "--config", path.to_str().unwrap(), "--P", "1.7"]));
    assert_eq!(overridden["P"], 1.7);
    assert_ne!(from_file["provenance"]["config_hash"], overridden["provenance"]["config_hash"]);
}

#[test]
fn validation_errors_exit_with_two() {
    for args in [
        &["cell", "--P", "1.0"][..],
        &["cell", "--h", "0.9"],
        &["cell", "--grid", "100"],
        &["expand", "--order", "9"],
        &["classical", "--potential", "quartic"],
        &["nonsense"],
    ] {
        let out = wkw(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr_json(&out)["exit_code"], 2);
    }
}

#[test]
fn sweep_writes_report_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(
        &cfg,
        r#"{
            "P": 1.6,
            "h_list": [0.16, 0.08, 0.04],
            "symbols": [
                { "name": "off", "x": { "constant": 1.0 }, "p": { "bump": { "center": 2.6, "half_width": 0.2 } } }
            ]
        }"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = wkw(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "--plot", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("sweep.json")).unwrap()).unwrap();
    let r = &report["reports"][0];
    assert_eq!(r["symbol"], "off");
    assert_eq!(r["limit"], 0.0);
    assert!(r["fit"]["order"].as_f64().unwrap() > 0.8);
    let hs: Vec<f64> = r["rows"].as_array().unwrap().iter().map(|x| x["h"].as_f64().unwrap()).collect();
    assert!(hs.windows(2).all(|w| w[1] < w[0]));
    let svg = std::fs::read_to_string(out_dir.join("sweep.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("slope"));
    assert!(Path::new(&out_dir.join("sweep.csv")).exists());
}

#[test]
fn phase_reports_lattice_points() {
    let out = wkw(&["phase", "--h", "0.05", "--s", "1.85", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "m,p_hat,two_pi_p_hat,j1,j2_re,j2_im,direct_re,direct_im,rel_error");
    assert_eq!(lines.count(), 1);
}

#[test]
fn wigner_summary_has_identities() {
    let out = wkw(&["wigner", "--h", "0.1", "--grid", "128"]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout_json(&out);
    assert!((s["mass"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(s["p_marginal_error"].as_f64().unwrap() < 1e-10);
    assert!(s["x_marginal_error"].as_f64().unwrap() < 1e-10);
}
