use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn arcpade(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arcpade"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .env_remove("ARC_PADE_BITS")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("run.json");
    fs::write(&path, text).unwrap();
    path
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().rev().find(|l| l.starts_with('{')).expect("error document on stderr");
    serde_json::from_str(line).unwrap()
}

#[test]
fn segment_trace_is_symmetric() {
    let dir = TempDir::new().unwrap();
    let o = arcpade(&["trace"], &configs().join("segment_chebyshev.json"), dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = json(&dir.path().join("trace.json"));
    assert!(t["symmetry_residual"].as_f64().unwrap() < 1e-10);
    assert!(dir.path().join("curve.csv").exists());
    assert!(!dir.path().join("error.json").exists());
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"schema_version": 1, "arc": {"kind": "segment"}, "degrees": [2], "degress": [3]}"#);
    let o = arcpade(&["ortho"], &cfg, &dir.path().join("out"));
    assert_eq!(code(&o), 64);
    let err = stderr_json(&o);
    assert_eq!(err["error"], "config");
    assert!(err["message"].as_str().unwrap().contains("degress"), "{err}");
}

#[test]
fn wrong_schema_version_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"schema_version": 7, "arc": {"kind": "segment"}, "degrees": [2]}"#);
    assert_eq!(code(&arcpade(&["trace"], &cfg, &dir.path().join("out"))), 64);
}

#[test]
fn segment_ortho_gives_monic_chebyshev() {
    let dir = TempDir::new().unwrap();
    let o = arcpade(&["ortho"], &configs().join("segment_chebyshev.json"), dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // T_8 / 2^7 = x^8 - 2x^6 + 1.25x^4 - 0.25x^2 + 1/128
    let expected = [1.0 / 128.0, 0.0, -0.25, 0.0, 1.25, 0.0, -2.0, 0.0, 1.0];
    let doc = json(&dir.path().join("ortho_n8.json"));
    let q = doc["q"].as_array().unwrap();
    assert_eq!(q.len(), expected.len());
    for (c, e) in q.iter().zip(expected) {
        let re: f64 = c[0].as_str().unwrap().parse().unwrap();
        let im: f64 = c[1].as_str().unwrap().parse().unwrap();
        assert!((re - e).abs() < 1e-30 && im.abs() < 1e-30, "{c} vs {e}");
    }
    let zeros = fs::read_to_string(dir.path().join("zeros_n8.csv")).unwrap();
    assert_eq!(zeros.lines().skip(1).filter(|l| !l.is_empty()).count(), 8);
}

#[test]
fn verify_passes_and_negative_control_fails() {
    let dir = TempDir::new().unwrap();
    let good = dir.path().join("good");
    let o = arcpade(&["verify"], &configs().join("segment_chebyshev.json"), &good);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&good.join("verify.json"))["pass"], true);

    let bad = dir.path().join("bad");
    let o = arcpade(&["verify"], &configs().join("negative_control.json"), &bad);
    assert_eq!(code(&o), 4);
    let err = stderr_json(&o);
    assert!(err["failed"].as_array().unwrap().iter().any(|f| f == "sa1"), "{err}");
    assert_eq!(json(&bad.join("error.json")), err);
}

#[test]
fn low_precision_reports_suggested_bits() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        r#"{"schema_version": 1, "precision_bits": 64, "arc": {"kind": "segment"}, "degrees": [30],
            "quad": {"initial_nodes": 64, "max_nodes": 4096, "stabilization_tol": 1e-15}}"#,
    );
    let o = arcpade(&["ortho"], &cfg, &dir.path().join("out"));
    assert_eq!(code(&o), 3);
    let err = stderr_json(&o);
    assert_eq!(err["n"], 30);
    assert!(err["suggested_bits"].as_u64().unwrap() > 64);
}

#[test]
fn plot_needs_its_inputs() {
    let dir = TempDir::new().unwrap();
    let o = arcpade(&["plot"], &configs().join("segment_chebyshev.json"), dir.path());
    assert_eq!(code(&o), 5);
    assert_eq!(stderr_json(&o)["error"], "plot");
}

#[test]
fn plot_after_ortho_and_with_empty_zero_files() {
    let dir = TempDir::new().unwrap();
    let cfg = configs().join("segment_chebyshev.json");
    assert_eq!(code(&arcpade(&["ortho"], &cfg, dir.path())), 0);
    fs::write(dir.path().join("zeros_n12.csv"), "re,im\n").unwrap();
    let o = arcpade(&["plot"], &cfg, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let svg = fs::read_to_string(dir.path().join("zeros.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.contains("<polyline") && svg.contains("n = 12"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = configs().join("segment_chebyshev.json");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        assert_eq!(code(&arcpade(&["ortho"], &cfg, d)), 0);
        assert_eq!(code(&arcpade(&["pade"], &cfg, d)), 0);
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 10);
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?} differs");
    }
}

#[test]
fn precision_sources_are_ranked() {
    let dir = TempDir::new().unwrap();
    let cfg = configs().join("segment_chebyshev.json");
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_arcpade"));
        cmd.args(["trace", "--quiet", "--config"]).arg(&cfg).arg("--out").arg(dir.path());
        cmd.env_remove("ARC_PADE_BITS");
        if let Some(v) = env {
            cmd.env("ARC_PADE_BITS", v);
        }
        if let Some(v) = flag {
            cmd.args(["--bits", v]);
        }
        assert!(cmd.status().unwrap().success());
        json(&dir.path().join("resolved_config.json"))["precision_bits"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 192);
    assert_eq!(run(Some("256"), None), 256);
    assert_eq!(run(Some("256"), Some("320")), 320);
}

#[test]
fn pade_writes_probes_and_error_field() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        r#"{"schema_version": 1, "arc": {"kind": "segment"}, "degrees": [4], "probes": [["2", "0"]],
            "field": {"re": [-2.0, 2.0], "im": [-1.0, 1.0], "nx": 5, "ny": 5, "tube": 0.2}}"#,
    );
    let out = dir.path().join("out");
    let o = arcpade(&["pade"], &cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(&out.join("pade_n4.json"));
    let probe = &doc["probes"][0];
    // rho_4(2) = 1 / (1 + (2 + sqrt 3)^-8)
    let rho = 1.0 / (1.0 + (2.0 + 3f64.sqrt()).powi(-8));
    assert!((probe["rho"][0].as_f64().unwrap() - rho).abs() < 1e-12, "{probe}");
    assert!(doc["p"].is_array());
    let field = fs::read_to_string(out.join("error_field_n4.csv")).unwrap();
    let mut lines = field.lines();
    assert_eq!(lines.next(), Some("re,im,abs_error,abs_rho_minus_one"));
    // 25 grid points minus -1, 0 and 1 on the segment
    assert_eq!(lines.count(), 22);
}

#[test]
fn resolved_config_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&arcpade(&["ortho"], &configs().join("circular_arc.json"), &a)), 0);
    let resolved = dir.path().join("resolved.json");
    fs::copy(a.join("resolved_config.json"), &resolved).unwrap();
    assert_eq!(code(&arcpade(&["ortho"], &resolved, &b)), 0);
    for name in ["resolved_config.json", "ortho_n8.json", "ortho_n24.json", "zeros_n24.csv", "curve.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name} differs");
    }
}

#[test]
fn bad_arguments_exit_as_configuration_errors() {
    let dir = TempDir::new().unwrap();
    let o = arcpade(&["trace", "--bits", "many"], &configs().join("segment_chebyshev.json"), dir.path());
    assert_eq!(code(&o), 64);
    let o = arcpade(&["frobnicate"], &configs().join("segment_chebyshev.json"), dir.path());
    assert_eq!(code(&o), 64);
}
