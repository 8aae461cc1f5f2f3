//! End-to-end behaviour of the `qheis` binary.

use std::process::Command;

fn qheis() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qheis"))
}

#[test]
fn reports_are_byte_identical_across_runs_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "4", "4"] {
        let path = dir.path().join(format!("r{}.json", outputs.len()));
        let st = qheis()
            .args(["suite", "braid", "--jobs", jobs, "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(st.success());
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn stdout_report_has_expected_shape() {
    let out = qheis().args(["suite", "sl2-fermi"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["cases", "params", "suite", "version"]);
    let case = &v["cases"][0];
    let keys: Vec<&String> = case.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["metadata", "name", "pass", "residual", "tolerance"]);
    // floats carry 17 significant digits
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("\"residual\"")).unwrap();
    let mantissa = line.split(':').nth(1).unwrap().trim().trim_end_matches(',').split('e').next().unwrap().to_string();
    assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
}

#[test]
fn usage_errors_exit_nonzero() {
    for args in [
        vec!["suite", "no-such-suite"],
        vec!["suite", "braid", "--sign", "+"],
        vec!["suite", "sl2-bose", "--q", "-1"],
        vec!["suite", "kz-scalar", "--hbar2", "nonsense"],
        vec!["suite"],
        vec!["suite", "braid", "--bogus"],
    ] {
        let st = qheis().args(&args).output().unwrap().status;
        assert!(!st.success(), "{args:?} should fail");
        assert_ne!(st.code(), Some(1), "{args:?} is a usage error, not a failed check");
    }
}

#[test]
fn failing_checks_exit_one() {
    // an impossible tolerance
    let out = qheis().args(["suite", "braid", "--q", "1.3", "--tol", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["cases"].as_array().unwrap().iter().any(|c| c["pass"] == false));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"q": [0.7], "cutoff": 6}"#).unwrap();
    let out = qheis().args(["suite", "sl2-bose", "--q", "1.3", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["params"]["cutoff"], 6);
    assert_eq!(v["params"]["q"][0].as_f64(), Some(1.3));

    std::fs::write(&cfg, r#"{"qq": [0.7]}"#).unwrap();
    let st = qheis().args(["suite", "sl2-bose", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn kz_scalar_complex_coupling() {
    let out = qheis().args(["suite", "kz-scalar", "--n", "2", "--hbar2", "0.1i", "--sign", "-"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["params"]["hbar2"][0], "0.1i");
    assert_eq!(v["params"]["sign"][0], "-");
}
