use std::io::Write;
use std::process::{Command, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fused-spacing"))
}

fn toy_csv(dir: &tempfile::TempDir) -> std::path::PathBuf {
    let path = dir.path().join("toy.csv");
    std::fs::write(&path, "2\n2\n0\n0\n").unwrap();
    path
}

#[test]
fn fit_emits_the_toy_path_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().arg("fit").arg(toy_csv(&dir)).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["command"], "fit");
    assert_eq!(v["n"], 4);
    assert_eq!(v["termination"]["reason"], "residual_exhausted");
    let step = &v["steps"][0];
    assert_eq!(step["lambda"], 2.0);
    assert_eq!(step["cut"], 2);
    assert_eq!(step["pair"], serde_json::json!([1, 2]));
    assert_eq!(step["sign"], -1);
}

#[test]
fn test_reports_inference_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let path = toy_csv(&dir);

    let json_out = bin().arg("test").arg(&path).args(["--sigma", "1"]).output().unwrap();
    assert!(json_out.status.success(), "{}", String::from_utf8_lossy(&json_out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&json_out.stdout).unwrap();
    assert_eq!(v["sigma_source"], "known");
    assert_eq!(v["p_value_kind"], "one_sided");
    let p = v["steps"][0]["p_value"].as_f64().unwrap();
    assert!((p - 0.0455).abs() < 1e-3, "p = {p}");
    assert!(v["steps"][0]["ci_lower"].as_f64().unwrap() < -2.0);

    let csv_out = bin()
        .arg("test")
        .arg(&path)
        .args(["--sigma", "1", "--format", "csv"])
        .output()
        .unwrap();
    assert!(csv_out.status.success());
    let text = String::from_utf8(csv_out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,lambda_prev,lambda,lambda_next,cut,left,right,sign,omega,\
         p_value,p_one_sided,jump_estimate,ci_lower,ci_upper"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "1");
    assert_eq!(row[4], "2");
    // the shortest-roundtrip float text must agree between formats
    assert_eq!(row[9].parse::<f64>().unwrap().to_bits(), p.to_bits());
}

#[test]
fn stdin_and_column_selection_work() {
    let mut child = bin()
        .args(["fit", "-", "--column", "logratio", "--format", "csv"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(b"probe,logratio\na,0.0\nb,0.1\nc,2.0\nd,2.1\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "k,lambda,cut,left,right,sign,omega");
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!((row[2], row[5]), ("2", "1"));
}

#[test]
fn missing_rows_warn_and_reindex_under_drop() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gaps.csv");
    std::fs::write(&path, "x\n2\nNA\n2\n0\n0\n").unwrap();

    let fail = bin().arg("fit").arg(&path).output().unwrap();
    assert!(!fail.status.success());
    assert!(String::from_utf8_lossy(&fail.stderr).contains("E-CSV"));

    let drop = bin().arg("fit").arg(&path).args(["--na", "drop"]).output().unwrap();
    assert!(drop.status.success());
    let warn = String::from_utf8_lossy(&drop.stderr);
    assert!(warn.contains("re-indexed"), "{warn}");
    let v: serde_json::Value = serde_json::from_slice(&drop.stdout).unwrap();
    assert_eq!(v["n"], 4);
    assert_eq!(v["steps"][0]["cut"], 2);
}

#[test]
fn errors_carry_stable_codes_and_nonzero_exits() {
    let out = bin().arg("fit").arg("/nonexistent/input.csv").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E-IO"));

    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.csv");
    std::fs::write(&flat, "1\n1\n1\n1\n").unwrap();
    let out = bin().arg("test").arg(&flat).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("E-CONFIG") && err.contains("--sigma"), "{err}");

    let out = bin().arg("test").arg(&flat).args(["--sigma", "1"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["no_changepoints"], true);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no changepoints"));
}

#[test]
fn verify_passes_and_prints_each_check() {
    let out = bin().arg("verify").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    for line in text.lines() {
        assert!(line.starts_with("ok"), "{line}");
    }
}

#[test]
fn toy_walkthrough_prints_the_candidate_table() {
    let out = bin().arg("toy").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("values: 2 2 0 0"), "{text}");
    assert!(text.contains("cut 2 sign -1 crosses at lambda = 2 <- taken"), "{text}");
    assert!(text.contains("no crossings left"), "{text}");
    assert!(text.contains("exact-solver scan agrees: true"), "{text}");

    let out = bin().args(["toy", "--format", "json"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["trailing_lambda"], 0.0);
    assert_eq!(v["oracle_agrees"], true);
}

#[test]
fn experiment_subcommand_emits_a_versioned_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = bin()
        .args(["experiment", "--kind", "calibration", "--n", "30", "--replicates", "40"])
        .args(["--seed", "5", "--output"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["config"]["kind"], "calibration");
    assert_eq!(v["config"]["n"], 30);
    assert_eq!(v["calibration"]["records"].as_array().unwrap().len(), 40);
    assert!(v.get("power").is_none() || v["power"].is_null());
}
