use std::process::Command;

use serde_json::Value;

fn derham(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_derham")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn write_json(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn power_of_z_shift_two() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_json(&dir, "Z-shift2.json", r#"{"ring": "Z", "ranks": {"2": 1}, "d": {}}"#);
    let (code, out) = derham(&["power", "--kind", "sym", "--r", "2", "--json-in", &f]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["homology"], serde_json::json!({"4": "Z"}));
}

#[test]
fn infinitesimal_preset() {
    let (code, out) = derham(&["inf", "--preset", "Fp-over-Z", "--N", "3"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    for s in ["0", "1", "2"] {
        assert_eq!(v["gr"][s], serde_json::json!({"0": "Z/3"}));
    }
}

#[test]
fn every_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    let z = write_json(&dir, "z.json", r#"{"ring": "Z", "ranks": {"0": 1}, "d": {}}"#);
    let zm1 = write_json(&dir, "zm1.json", r#"{"ring": "Z", "ranks": {"-1": 1}, "d": {}}"#);
    let cases: Vec<Vec<&str>> = vec![
        vec!["lsym", "--json-in", &z, "--weight-cutoff", "3"],
        vec!["lsym", "--json-in", &z, "--ring", "F2"],
        vec!["cotangent", "--preset", "hypersurface-x2"],
        vec!["derham", "--preset", "Fp-over-Z", "--p", "5", "--N", "2"],
        vec!["hh", "--preset", "Zx", "--N", "2", "--bound", "2"],
        vec!["circle", "--N", "4"],
        vec!["graded-table", "--json-in", &zm1, "--flavor", "B", "--weight-cutoff", "2"],
        vec!["crys-stub", "--i", "1", "--rank", "2", "--N", "2"],
    ];
    for args in cases {
        let (code, out) = derham(&args);
        assert_eq!(code, 0, "{args:?}: {out}");
        assert!(serde_json::from_str::<Value>(&out).is_ok());
    }
}

#[test]
fn exit_codes_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_json(&dir, "bad.json", "{not json");
    let (code, out) = derham(&["power", "--kind", "sym", "--r", "2", "--json-in", &bad]);
    assert_eq!(code, 2);
    assert!(serde_json::from_str::<Value>(&out).unwrap()["error"].is_string());

    let neg = write_json(&dir, "neg.json", r#"{"ring": "Z", "ranks": {"-2": 1}, "d": {}}"#);
    let (code, out) = derham(&["power", "--kind", "sym", "--r", "2", "--json-in", &neg]);
    assert_eq!(code, 3, "{out}");

    let (code, _) = derham(&["circle", "--N", "1"]);
    assert_eq!(code, 3);
    let (code, _) = derham(&["no-such-command"]);
    assert_eq!(code, 2);
    let (code, _) = derham(&["inf"]);
    assert_eq!(code, 2);
}

#[test]
fn output_is_byte_stable_and_out_flag_writes_file() {
    let (_, a) = derham(&["hh", "--preset", "hypersurface-x2", "--N", "3"]);
    let (_, b) = derham(&["hh", "--preset", "hypersurface-x2", "--N", "3"]);
    assert_eq!(a, b);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let (code, stdout) = derham(&["hh", "--preset", "hypersurface-x2", "--N", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), a);
}

#[test]
fn suite_passes_and_is_thread_independent() {
    let (code, out) = derham(&["paper-suite"]);
    assert_eq!(code, 0, "{out}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["total"].as_u64().unwrap() > 0);
    assert_eq!(v["passed"], v["total"]);
    for c in v["cases"].as_array().unwrap() {
        assert!(["quoted", "computed", "immediate"].contains(&c["source"].as_str().unwrap()));
        assert_eq!(c["sha256"].as_str().unwrap().len(), 64);
    }
    let serial = Command::new(env!("CARGO_BIN_EXE_derham")).arg("paper-suite").env("DERHAM_THREADS", "0").output().unwrap();
    assert_eq!(String::from_utf8(serial.stdout).unwrap(), out);
    assert!(String::from_utf8(serial.stderr).unwrap().contains(" ms"));
}

#[test]
fn corrupted_golden_names_the_failure() {
    let mut g: Value = serde_json::from_str(derham_core::cli::GOLDEN).unwrap();
    g["cases"]["circle-N4"]["expected"] = Value::String("H_0 = Z".into());
    let dir = tempfile::tempdir().unwrap();
    let f = write_json(&dir, "golden.json", &g.to_string());
    let (code, out) = derham(&["paper-suite", "--golden", &f]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    let failed: Vec<&Value> = v["cases"].as_array().unwrap().iter().filter(|c| c["pass"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["name"], "circle-N4");
    assert_eq!(failed[0]["expected"], "H_0 = Z");
    assert!(failed[0]["computed"].as_str().unwrap().contains("H_1 = Z"));
}
