//! End-to-end checks of the `conan` binary: the exit-code table, the
//! one-line-per-finding stdout contract, and report-file emission.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const QUIET_MANIFEST: &str = r#"<manifest xmlns:android="http://schemas.android.com/apk/res/android" package="demo">
  <uses-permission android:name="android.permission.INTERNET"/>
  <application><activity android:name=".Usage">
    <intent-filter><action android:name="android.intent.action.MANAGE_NETWORK_USAGE"/></intent-filter>
  </activity></application>
</manifest>"#;

fn write(root: &Path, rel: &str, text: &str) {
    let p = root.join(rel);
    fs::create_dir_all(p.parent().unwrap()).unwrap();
    fs::write(p, text).unwrap();
}

/// A project with no triggers and no library use: zero findings.
fn clean_project(dir: &TempDir) {
    write(
        dir.path(),
        "app/src/main/AndroidManifest.xml",
        QUIET_MANIFEST,
    );
    write(
        dir.path(),
        "app/src/main/java/demo/Plain.java",
        "class Plain { void f() { g(); } void g() { } }",
    );
}

/// A project with an unchecked synchronous HttpURLConnection request.
fn finding_project(dir: &TempDir) {
    write(
        dir.path(),
        "app/src/main/AndroidManifest.xml",
        QUIET_MANIFEST,
    );
    write(
        dir.path(),
        "app/src/main/java/demo/Fetch.java",
        r#"import java.net.URL;
class Fetch {
  void fetch() throws Exception {
    URL url = new URL("https://example.org");
    url.openConnection();
  }
}"#,
    );
}

fn conan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn clean_project_exits_zero_with_empty_stdout() {
    let dir = TempDir::new().unwrap();
    clean_project(&dir);
    let out_dir = dir.path().join("out");
    let out = conan(&[
        "--root",
        dir.path().to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--fail-on-findings",
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(out_dir.join("conan-report.json")).unwrap()).unwrap();
    assert_eq!(json["findings"].as_array().unwrap().len(), 0);
    assert!(out_dir.join("conan-report.html").exists());
}

#[test]
fn findings_with_fail_flag_exit_one_and_line_count_matches() {
    let dir = TempDir::new().unwrap();
    finding_project(&dir);
    let out_dir = dir.path().join("out");
    let out = conan(&[
        "--root",
        dir.path().to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--fail-on-findings",
    ]);
    assert_eq!(code(&out), 1);
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(out_dir.join("conan-report.json")).unwrap()).unwrap();
    let findings = json["findings"].as_array().unwrap();
    assert!(!findings.is_empty());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), findings.len());
}

#[test]
fn findings_without_fail_flag_exit_zero() {
    let dir = TempDir::new().unwrap();
    finding_project(&dir);
    let out = conan(&[
        "--root",
        dir.path().to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(!out.stdout.is_empty());
}

#[test]
fn nonexistent_root_is_usage_error() {
    let out = conan(&["--root", "/definitely/not/a/dir"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn conflicting_enable_disable_is_usage_error() {
    let dir = TempDir::new().unwrap();
    clean_project(&dir);
    let out = conan(&[
        "--root",
        dir.path().to_str().unwrap(),
        "--enable",
        "syn",
        "--disable",
        "syn",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = conan(&["--such-flag"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_manifest_is_fatal() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "app/src/main/java/demo/Plain.java",
        "class Plain { }",
    );
    let out = conan(&[
        "--root",
        dir.path().to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn malformed_manifest_is_fatal() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "app/src/main/AndroidManifest.xml",
        "<manifest><oops",
    );
    let out = conan(&[
        "--root",
        dir.path().to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn ambiguous_module_is_usage_error_and_module_flag_resolves_it() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "core/src/main/AndroidManifest.xml",
        QUIET_MANIFEST,
    );
    write(dir.path(), "web/src/main/AndroidManifest.xml", QUIET_MANIFEST);
    let root = dir.path().to_str().unwrap().to_string();
    let out_dir = dir.path().join("out");
    let out_arg = out_dir.to_str().unwrap();

    let out = conan(&["--root", &root, "--out", out_arg]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("module"));

    let out = conan(&["--root", &root, "--out", out_arg, "--module", "web"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn version_flag_exits_zero() {
    let out = conan(&["--version"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("conan"));
}

#[test]
fn disabling_rules_removes_their_findings() {
    let dir = TempDir::new().unwrap();
    finding_project(&dir);
    let out_dir = dir.path().join("out");
    let out = conan(&[
        "--root",
        dir.path().to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--enable",
        "syn",
        "--fail-on-findings",
    ]);
    assert_eq!(code(&out), 1);
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(out_dir.join("conan-report.json")).unwrap()).unwrap();
    let rules: Vec<&str> = json["findings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["rule"].as_str().unwrap())
        .collect();
    assert_eq!(rules, vec!["SYN"]);
}

#[test]
fn format_json_writes_only_json() {
    let dir = TempDir::new().unwrap();
    clean_project(&dir);
    let out_dir = dir.path().join("out");
    let out = conan(&[
        "--root",
        dir.path().to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    assert!(out_dir.join("conan-report.json").exists());
    assert!(!out_dir.join("conan-report.html").exists());
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    finding_project(&dir);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out_dir in [&out_a, &out_b] {
        let out = conan(&[
            "--root",
            dir.path().to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(
        fs::read(out_a.join("conan-report.json")).unwrap(),
        fs::read(out_b.join("conan-report.json")).unwrap()
    );
    assert_eq!(
        fs::read(out_a.join("conan-report.html")).unwrap(),
        fs::read(out_b.join("conan-report.html")).unwrap()
    );
}
