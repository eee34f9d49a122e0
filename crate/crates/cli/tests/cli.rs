// Copyright 2026 su3kit Contributors
// SPDX-License-Identifier: Apache-2.0

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_su3kit"))
}

#[test]
fn dim_prints_dimension() {
    let out = bin().args(["dim", "2", "1"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "15");
}

#[test]
fn series_matches_adjoint_square() {
    let out = bin().args(["series", "1", "1", "1", "1"]).output().unwrap();
    assert!(out.status.success());
    let s = String::from_utf8_lossy(&out.stdout);
    assert_eq!(
        s.trim(),
        r#"[{"class":[2,2],"multiplicity":1},{"class":[0,3],"multiplicity":1},{"class":[3,0],"multiplicity":1},{"class":[1,1],"multiplicity":2},{"class":[0,0],"multiplicity":1}]"#
    );
}

#[test]
fn basis_json_has_gt_shape() {
    let out = bin().args(["basis", "1", "0"]).output().unwrap();
    assert!(out.status.success());
    let s = String::from_utf8_lossy(&out.stdout);
    assert_eq!(
        s.trim(),
        r#"[{"nu":[1,0,0],"twoJ":0},{"nu":[0,1,0],"twoJ":1},{"nu":[0,0,1],"twoJ":1}]"#
    );
}

#[test]
fn cgc_is_byte_identical_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        bin()
            .args(["cgc", "1", "1", "1", "1"])
            .arg("--cache-dir")
            .arg(dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    let second = run();
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout, "byte-identical output");
    let stderr1 = String::from_utf8_lossy(&first.stderr);
    let stderr2 = String::from_utf8_lossy(&second.stderr);
    assert!(stderr1.contains("cache store"), "first run stores: {stderr1}");
    assert!(stderr2.contains("cache hit"), "second run hits: {stderr2}");
}

#[test]
fn corrupted_cache_is_rebuilt() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        bin()
            .args(["cgc", "1", "0", "0", "1"])
            .arg("--cache-dir")
            .arg(dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    // truncate the single cache file
    let entry = std::fs::read_dir(dir.path())
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let text = std::fs::read_to_string(&entry).unwrap();
    std::fs::write(&entry, &text[..text.len() / 3]).unwrap();
    let second = run();
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
    let stderr = String::from_utf8_lossy(&second.stderr);
    assert!(
        stderr.contains("rebuilding") || stderr.contains("cache store"),
        "rebuild after corruption: {stderr}"
    );
}

#[test]
fn unknown_command_exits_2() {
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suite_passes_and_tol_override_fails() {
    let ok = bin()
        .args(["verify", "--suite", "rep-core", "--max-weight", "6"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let strict = bin()
        .args([
            "verify",
            "--suite",
            "irrep",
            "--max-weight",
            "2",
            "--tol",
            "1e-30",
        ])
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(1), "forced failure exits 1");
}

#[test]
fn kernel_and_classify_shapes() {
    let out = bin()
        .args(["kernel", "1", "0", "--char", "berezin"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let s = String::from_utf8_lossy(&out.stdout);
    assert!(s.contains("\"kind\":\"pure\""));
    assert!(s.contains("\"matrices\":["));
    assert!(s.contains("\"kernel\":{"));

    let out = bin()
        .args(["classify", "2", "0", "--char", "sw"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let s = String::from_utf8_lossy(&out.stdout);
    assert!(s.contains("\"isSW\":true"));
    assert!(s.contains("\"isMappingPositive\":false"));
}

#[test]
fn twist_envelope_kind() {
    let out = bin()
        .args(["twist", "1", "0", "--char", "berezin"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let s = String::from_utf8_lossy(&out.stdout);
    assert!(s.contains("\"kind\":\"twistConstants\""));
}

#[test]
fn harmonics_validates_labels() {
    let bad = bin().args(["harmonics", "cp2", "1", "0"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let good = bin().args(["harmonics", "flag", "3", "0"]).output().unwrap();
    assert!(good.status.success());
    assert!(String::from_utf8_lossy(&good.stdout).contains("\"gamma\":1"));
}
