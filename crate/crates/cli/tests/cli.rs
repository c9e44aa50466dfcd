use std::path::PathBuf;
use std::process::{Command, Output};

use qtopo::{linking_matrix, tau_abelian, FramedLinkMatrix, Guard, Method, ModK, PolyLink};
use serde_json::{json, Value};
use tempfile::TempDir;

fn qtopo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtopo")).args(args).output().unwrap()
}

fn qtopo_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtopo")).args(args).env(key, val).output().unwrap()
}

fn write(dir: &TempDir, name: &str, v: &Value) -> String {
    let p: PathBuf = dir.path().join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_owned()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn hopf_link() -> Value {
    json!({
        "components": [
            {
                "points": [[-1, -1, 0], [1, -1, 0], [1, 1, 0], [-1, 1, 0]],
                "offsets": [[0, 0, 1], [0, 0, 1], [0, 0, 1], [0, 0, 1]]
            },
            {
                "points": [[0, 0, -1], [2, 0, -1], [2, 0, 1], [0, 0, 1]],
                "offsets": [[0, 1, 0], [0, 1, 0], [0, 1, 0], [0, 1, 0]]
            }
        ],
        "delta": 0.05
    })
}

#[test]
fn abelian_on_polygonal_hopf_matches_library() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "hopf.json", &hopf_link());
    let v = stdout_json(&qtopo(&["tau-abelian", "--k", "5", "-i", &input]));

    let link = PolyLink::<f64>::from_json_value(&hopf_link()).unwrap();
    let j = linking_matrix(&link, link.delta).unwrap();
    let lib = tau_abelian::<f64>(&j, &ModK::new(5).unwrap(), Method::Factorized, Guard::default()).unwrap();
    assert_eq!(v["re"].as_f64().unwrap(), lib.value.re);
    assert_eq!(v["im"].as_f64().unwrap(), lib.value.im);
    assert_eq!(v["m"], 2);
    assert_eq!(v["method"], "factorized");
}

#[test]
fn linking_matrix_of_hopf() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "hopf.json", &hopf_link());
    let v = stdout_json(&qtopo(&["linking-matrix", "-i", &input]));
    let j = FramedLinkMatrix::from_json_value(&v).unwrap();
    assert_eq!(j.get(0, 0), 0);
    assert_eq!(j.get(1, 1), 0);
    assert_eq!(j.get(0, 1).abs(), 1);
}

#[test]
fn su2_and_dw_on_unknot() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "unknot_p1.json", &json!({"m": 1, "J": [[1]]}));
    let v = stdout_json(&qtopo(&["tau-su2k3", "-i", &input]));
    assert!((v["re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["im"].as_f64().unwrap().abs() < 1e-12);

    let v = stdout_json(&qtopo(&["tau-dw", "--k", "5", "--range", "full", "-i", &input]));
    assert!((v["re"].as_f64().unwrap() - 0.4472136).abs() < 1e-7);
}

#[test]
fn output_file_and_determinism() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "j.json", &json!({"m": 3, "J": [[2, 1, 0], [1, -1, 1], [0, 1, 3]]}));
    let out = dir.path().join("out.json");
    let out_s = out.to_str().unwrap();
    let r = qtopo(&["tau-abelian", "--k", "9", "--method", "brute", "-i", &input, "-o", out_s]);
    assert!(r.status.success());
    assert!(r.stdout.is_empty());
    let first = std::fs::read(&out).unwrap();
    qtopo(&["tau-abelian", "--k", "9", "--method", "brute", "-i", &input, "-o", out_s]);
    assert_eq!(first, std::fs::read(&out).unwrap());

    let a = qtopo(&["simulate", "--k", "7", "--a", "3", "--eps", "0.1", "--seed", "11"]);
    let b = qtopo(&["simulate", "--k", "7", "--a", "3", "--eps", "0.1", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn simulate_examples() {
    let v = stdout_json(&qtopo(&["simulate", "--k", "5", "--a", "2", "--eps", "0.05", "--seed", "7"]));
    let phi = v["phi_hat"].as_f64().unwrap();
    assert!(std::f64::consts::PI - phi.abs() <= 0.05);
    for key in ["k", "a", "phi_hat", "phi_true", "epsilon", "samples", "seed"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }

    let v = stdout_json(&qtopo(&["simulate", "--k", "3", "--a", "1", "--eps", "0.05", "--seed", "7"]));
    assert!((v["phi_hat"].as_f64().unwrap() + std::f64::consts::FRAC_PI_2).abs() <= 0.05);
}

#[test]
fn gauss_sum_command() {
    let v = stdout_json(&qtopo(&["gauss-sum", "--k", "3", "--a", "1"]));
    assert!(v["re"].as_f64().unwrap().abs() < 1e-12);
    assert!((v["im"].as_f64().unwrap() + 3f64.sqrt()).abs() < 1e-12);
    let v = stdout_json(&qtopo(&["gauss-sum", "--k", "5", "--a", "-3"]));
    assert!((v["re"].as_f64().unwrap() + 5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn checks_pass() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "random.json", &json!({"m": 3, "J": [[2, 1, 0], [1, -1, 1], [0, 1, 3]]}));
    let v = stdout_json(&qtopo(&["check", "--invariant", "su2k3", "--moves", "10", "--seed", "1", "-i", &input]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["properties"][0]["kirby"]["steps"].as_array().unwrap().len(), 10);

    let v = stdout_json(&qtopo(&["check", "--invariant", "abelian", "--k", "5", "-i", &input]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["properties"][0]["property"], "factorized_vs_brute");

    let v = stdout_json(&qtopo(&["check", "--invariant", "dw", "--k", "5", "--moves", "8", "--seed", "3", "-i", &input]));
    assert_eq!(v["passed"], true);

    // empty script
    let v = stdout_json(&qtopo(&["check", "--invariant", "su2k3", "-i", &input]));
    assert_eq!(v["passed"], true);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "good.json", &json!({"m": 1, "J": [[1]]}));
    let code = |o: Output| o.status.code().unwrap();

    assert_eq!(code(qtopo(&["simulate", "--k", "4", "--a", "1", "--eps", "0.05"])), 2);
    assert_eq!(code(qtopo(&["simulate", "--k", "5", "--a", "1", "--eps", "1.5"])), 2);
    assert_eq!(code(qtopo(&["tau-abelian", "--k", "6", "-i", &good])), 2);
    assert_eq!(code(qtopo(&["tau-su2k3", "-i", "/nonexistent/file.json"])), 2);
    assert_eq!(code(qtopo(&["check", "--invariant", "abelian", "-i", &good])), 2);
    assert_eq!(code(qtopo(&["tau-dw", "--k", "5", "--range", "sideways", "-i", &good])), 2);
    assert_eq!(code(qtopo_env(&["tau-su2k3", "-i", &good], "QTOPO_GUARD", "lots")), 2);

    let asym = write(&dir, "asym.json", &json!({"m": 2, "J": [[0, 1], [2, 0]]}));
    let out = qtopo(&["tau-su2k3", "-i", &asym]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/J/1/0"));

    let bad_point = write(&dir, "bad.json", &json!({"components": [{"points": [[0, 0], [1, 0, 0], [0, 1, 0]], "offsets": [[0, 0, 1], [0, 0, 1], [0, 0, 1]]}], "delta": 0.1}));
    let out = qtopo(&["linking-matrix", "-i", &bad_point]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/components/0/points/0"));

    let neither = write(&dir, "neither.json", &json!({"x": 1}));
    assert_eq!(code(qtopo(&["tau-su2k3", "-i", &neither])), 3);

    let big = write(&dir, "big.json", &json!({"m": 3, "J": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}));
    assert_eq!(code(qtopo_env(&["tau-dw", "--k", "5", "-i", &big], "QTOPO_GUARD", "10")), 4);
    assert_eq!(code(qtopo_env(&["tau-dw", "--k", "5", "-i", &big], "QTOPO_GUARD", "1000")), 0);
}
