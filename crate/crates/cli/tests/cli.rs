use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn workbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_workbench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(kind: &str, config: &Path, out: &Path) -> Output {
    workbench(&[
        kind,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn apply_writes_artifacts_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "apply.json",
        r#"{"kind":"apply","op":"rl-left","alpha":0.5,
            "grid":{"a":0.0,"b":1.0,"m":64},"function":{"name":"bump"}}"#,
    );
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    assert_eq!(code(&run("apply", &cfg, &out1)), 0);
    assert_eq!(code(&run("apply", &cfg, &out2)), 0);
    for name in ["result.csv", "report.json", "manifest.json"] {
        assert!(out1.join(name).exists(), "{name} missing");
    }
    // identical config + seed => bitwise-identical CSV
    assert_eq!(
        fs::read(out1.join("result.csv")).unwrap(),
        fs::read(out2.join("result.csv")).unwrap()
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out1.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "apply");
    assert_eq!(manifest["seed"], 0);
    assert!(manifest["config_sha256"].as_str().unwrap().len() == 64);
    assert!(!manifest["anchor"].as_str().unwrap().is_empty());
}

#[test]
fn apply_order_zero_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "id.json",
        r#"{"kind":"apply","op":"rl-left","alpha":0.0,
            "grid":{"a":0.0,"b":1.0,"m":32},"function":{"name":"gauss","center":0.5,"width":0.2}}"#,
    );
    let out1 = dir.path().join("a");
    assert_eq!(code(&run("apply", &cfg, &out1)), 0);
    // feed the output back through the order-zero operator: fixed point
    let input = out1.join("result.csv").to_str().unwrap().replace('\\', "/");
    let cfg2 = write_config(
        dir.path(),
        "id2.json",
        &format!(r#"{{"kind":"apply","op":"rl-left","alpha":0.0,"input_csv":"{input}"}}"#),
    );
    let out2 = dir.path().join("b");
    assert_eq!(code(&run("apply", &cfg2, &out2)), 0);
    assert_eq!(
        fs::read(out1.join("result.csv")).unwrap(),
        fs::read(out2.join("result.csv")).unwrap()
    );
}

#[test]
fn audit_exit_codes_distinguish_pass_and_failure() {
    let dir = tempfile::tempdir().unwrap();
    let pass_cfg = write_config(
        dir.path(),
        "pass.json",
        r#"{"kind":"audit","name":"kernel-normalization","tol":1e-8}"#,
    );
    let out = dir.path().join("pass");
    assert_eq!(code(&run("audit", &pass_cfg, &out)), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["items"].as_array().unwrap().len(), 5);

    // unreachable tolerance: numerical-audit failure is exit code 2
    let fail_cfg = write_config(
        dir.path(),
        "fail.json",
        r#"{"kind":"audit","name":"kernel-normalization","tol":1e-30}"#,
    );
    let out_f = dir.path().join("fail");
    assert_eq!(code(&run("audit", &fail_cfg, &out_f)), 2);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_f.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn usage_errors_are_exit_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "apply.json",
        r#"{"kind":"apply","op":"rl-left","alpha":0.5,
            "grid":{"a":0.0,"b":1.0,"m":16},"function":{"name":"bump"}}"#,
    );
    // config kind does not match the subcommand
    assert_eq!(code(&run("power", &cfg, &dir.path().join("x"))), 1);
    // missing config file
    assert_eq!(code(&run("apply", &dir.path().join("nope.json"), &dir.path().join("y"))), 1);
    // referenced path missing
    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{"kind":"apply","op":"rl-left","alpha":0.5,"input_csv":"missing.csv"}"#,
    );
    assert_eq!(code(&run("apply", &bad, &dir.path().join("z"))), 1);
    // non-positive tolerance rejected at load
    let badtol = write_config(
        dir.path(),
        "badtol.json",
        r#"{"kind":"audit","name":"kernel-normalization","tol":-1.0}"#,
    );
    assert_eq!(code(&run("audit", &badtol, &dir.path().join("w"))), 1);
}

#[test]
fn catalog_round_trips_through_json() {
    let out = workbench(&["list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let entries: serde_json::Value = serde_json::from_str(&text).unwrap();
    let entries = entries.as_array().unwrap();
    assert!(!entries.is_empty());
    for e in entries {
        // every entry names a module operation
        assert!(e["op"].as_str().unwrap().contains("::"), "{e}");
        assert!(!e["anchor"].as_str().unwrap().is_empty());
    }
    // round trip: serialize back and reparse identically
    let again: serde_json::Value =
        serde_json::from_str(&serde_json::to_string(&entries).unwrap()).unwrap();
    assert_eq!(again.as_array().unwrap(), entries);
}

#[test]
fn power_writes_reusable_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "power.json",
        r#"{"kind":"power","matrix":{"source":"random-hpd","n":5,"seed":3},
            "alpha":0.5,"sign":"positive"}"#,
    );
    let out = dir.path().join("p");
    assert_eq!(code(&run("power", &cfg, &out)), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report["residual"].as_f64().unwrap() < 1e-8);
    assert!(out.join("result.bin").exists());

    // the emitted binary is consumable as a matrix source
    let bin = out.join("result.bin").to_str().unwrap().replace('\\', "/");
    let cfg2 = write_config(
        dir.path(),
        "audit.json",
        &format!(
            r#"{{"kind":"audit","name":"numerical-range","matrix":{{"source":"file","path":"{bin}"}},"tol":1e-8}}"#
        ),
    );
    assert_eq!(code(&run("audit", &cfg2, &dir.path().join("q"))), 0);
}

#[test]
fn solve_reports_residual_and_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "solve.json",
        r#"{"kind":"solve","w":{"source":"random-hpd","n":4},
            "phi":{"l":0,"coeffs":[[0.2,0.0],[1.0,0.0]],"theta":0.05},
            "alpha":1.0,"f":{"name":"random"},
            "times":{"t_max":1.0,"steps":20},"seed":7}"#,
    );
    let out = dir.path().join("s");
    assert_eq!(code(&run("solve", &cfg, &out)), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["dim"], 4);
    assert!(report["residual"]["max_rel"].as_f64().unwrap() < 0.1);
    assert_eq!(report["uniqueness"]["accretive"], true);
    // CSV: header plus one row per time, 1 + 2n columns
    let csv = fs::read_to_string(out.join("result.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 22);
    assert_eq!(lines[0].split(',').count(), 9);
}

#[test]
fn solve_sector_violation_is_audit_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "solve.json",
        r#"{"kind":"solve","w":{"source":"random-hpd","n":3},
            "phi":{"l":0,"coeffs":[[1.0,0.0],[0.0,1.0]],"theta":0.05},
            "alpha":1.0,"f":{"name":"ones"},
            "times":{"t_max":1.0,"steps":10}}"#,
    );
    let out = dir.path().join("s");
    assert_eq!(code(&run("solve", &cfg, &out)), 2);
    // machine-readable failure report still written
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn elliptic_order_study_fits_first_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "study.json",
        r#"{"kind":"study","name":"elliptic-order","ms":[8,16,32,64],"min_order":0.9}"#,
    );
    let out = dir.path().join("s");
    assert_eq!(code(&run("study", &cfg, &out)), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let order = report["fitted_order"].as_f64().unwrap();
    assert!(order > 0.9, "order {order}");
    let ci = report["order_ci95"].as_array().unwrap();
    assert!(ci[0].as_f64().unwrap() <= order && order <= ci[1].as_f64().unwrap());
    // result.csv carries the sweep
    let csv = fs::read_to_string(out.join("result.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("h,error"));
}

#[test]
fn generator_bridge_study_converges() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "study.json",
        r#"{"kind":"study","name":"generator-bridge","alpha":0.5,
            "ms":[32,64,128],"min_order":0.5}"#,
    );
    let out = dir.path().join("s");
    assert_eq!(code(&run("study", &cfg, &out)), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["decreasing"], true);
    assert!(report["fitted_order"].as_f64().unwrap() >= 0.5);
}

#[test]
fn assemble_interval_matches_stencil() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "asm.json",
        r#"{"kind":"assemble","domain":{"type":"interval","d":1.0,"m":24},
            "coeffs":[{"name":"constant","value":1.0}]}"#,
    );
    let out = dir.path().join("a");
    assert_eq!(code(&run("assemble", &cfg, &out)), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    // constant coefficients: assembly and stencil agree to rounding
    assert!(report["stencil_residual"].as_f64().unwrap() < 1e-9);
    assert!(out.join("result.bin").exists());
}
