use serde_json::Value;
use std::process::{Command, Output};

fn wrlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wrlat"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env_remove("WRLAT_PRECISION_BITS")
        .output()
        .expect("spawn wrlat")
}

fn json(args: &[&str]) -> Value {
    let out = wrlat(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn field_info_ramified() {
    let v = json(&["field-info", "-p", "3", "-n", "9"]);
    assert_eq!(v["field"]["ramified"], true);
    assert_eq!(v["discriminant"], "81");
    assert_eq!(v["trace_table"]["tr_pair_diag"]["provenance"], "closed-form");
    assert_eq!(v["manifest"]["timestamp"], 1700000000);
}

#[test]
fn field_info_rejects_bad_conductor() {
    let out = wrlat(&["field-info", "-p", "3", "-n", "12"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("factor 2 is not 1 mod p"), "{err}");
}

#[test]
fn field_info_lists_choices() {
    let v = json(&["field-info", "-p", "3", "-n", "63"]);
    assert_eq!(v["character_choices"]["count"], 2);
    let v = json(&["field-info", "-p", "3", "-n", "63", "--choice", "1"]);
    assert_eq!(v["character_choices"]["selected"], 1);
    assert_eq!(v["manifest"]["choice_index"], 1);
    let out = wrlat(&["field-info", "-p", "3", "-n", "63", "--choice", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn embedding_csv_has_p_rows() {
    let out = wrlat(&["field-info", "-p", "5", "-n", "11", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().all(|l| l.split(',').count() == 5));
}

#[test]
fn lattice_examples() {
    let v = json(&["lattice", "-p", "3", "-n", "9", "--family", "orbit", "-m", "1"]);
    assert_eq!(v["well_rounded"], true);
    assert_eq!(v["density"]["delta_computed"], 0.125);
    assert_eq!(v["density"]["discrepancy_flag"], true);
    assert_eq!(v["gram"], serde_json::json!([["9", "0", "0"], ["0", "9", "0"], ["0", "0", "9"]]));
    let v = json(&["lattice", "-p", "3", "-n", "7", "--family", "mm", "-m", "4"]);
    assert_eq!(v["well_rounded"], true);
    assert_eq!(v["wr_window"], true);
    let v = json(&["lattice", "-p", "3", "-n", "9", "--family", "mmc", "-m", "5", "-c", "2"]);
    assert_eq!(v["index"]["computed"], "5");
}

#[test]
fn lattice_family_field_mismatch() {
    for args in [
        ["lattice", "-p", "3", "-n", "9", "--family", "bj"].as_slice(),
        &["lattice", "-p", "3", "-n", "7", "--family", "orbit", "-m", "2"],
        &["lattice", "-p", "3", "-n", "7", "--family", "bram"],
        &["lattice", "-p", "3", "-n", "9", "--family", "mm"],
    ] {
        assert_eq!(wrlat(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn lattice_gram_csv() {
    let out = wrlat(&["lattice", "-p", "3", "-n", "9", "--family", "ok", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "3,0,0\n0,6,-3\n0,-3,6\n");
}

#[test]
fn scan_only_wr_unramified() {
    let v = json(&["scan", "-p", "3", "-n", "7", "--family", "mm", "--m", "1..12", "--only-wr"]);
    let rows = v["rows"].as_array().unwrap();
    assert!(rows.iter().all(|r| r["well_rounded"] == true));
    let ms: Vec<u64> = rows.iter().map(|r| r["m"].as_u64().unwrap()).collect();
    assert!(ms.contains(&4));
    // rows with m ≡ 1 mod 3 are exactly those inside the window
    for r in rows.iter().filter(|r| r["m"].as_u64().unwrap() % 3 == 1) {
        assert_eq!(r["window"], true);
    }
}

#[test]
fn scan_agreement_on_ramified_mm() {
    let v = json(&["scan", "-p", "5", "-n", "25", "--family", "mm", "--m", "2..20"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 19);
    assert!(rows.iter().all(|r| r["agree"] == true && r["error"].is_null()));
}

#[test]
fn scan_mmc_enumerates_residues() {
    let v = json(&["scan", "-p", "3", "-n", "9", "--family", "mmc", "--m", "2..3"]);
    let pairs: Vec<(u64, u64)> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["m"].as_u64().unwrap(), r["c"].as_u64().unwrap()))
        .collect();
    assert_eq!(pairs, vec![(2, 0), (2, 1), (3, 0), (3, 1), (3, 2)]);
}

#[test]
fn scan_rejects_unindexed_family() {
    assert_eq!(wrlat(&["scan", "-p", "3", "-n", "9", "--family", "ok", "--m", "1..3"]).status.code(), Some(2));
    assert_eq!(wrlat(&["scan", "-p", "3", "-n", "9", "--family", "mm", "--m", "3..1"]).status.code(), Some(2));
}

#[test]
fn manifest_ignores_jobs_and_out() {
    let dir = std::env::temp_dir().join(format!("wrlat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("scan.json");
    let out = wrlat(&[
        "scan", "-p", "3", "-n", "9", "--family", "mm", "--m", "1..4", "--jobs", "3", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let cmd: Vec<&str> = v["manifest"]["command_line"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap())
        .collect();
    assert_eq!(cmd, ["wrlat", "scan", "-p", "3", "-n", "9", "--family", "mm", "--m", "1..4"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_wrlat"))
        .args(["field-info", "-p", "3", "-n", "7"])
        .env("WRLAT_PRECISION_BITS", "128")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["manifest"]["precision_bits"], 128);
    let v = json(&["field-info", "-p", "3", "-n", "7", "--precision", "96"]);
    assert_eq!(v["manifest"]["precision_bits"], 96);
}

#[test]
fn verify_exit_codes() {
    let out = wrlat(&["verify", "wr-window"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["checks"][0]["anchor"].as_str().unwrap().contains("WR iff"));
    let out = wrlat(&["verify", "minima", "--format", "table"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("first failure in minima/"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(wrlat(&["lattice", "-p", "3"]).status.code(), Some(2));
    assert_eq!(wrlat(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(wrlat(&["--version"]).status.code(), Some(0));
}
