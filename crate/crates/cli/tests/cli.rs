use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn tropid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropid")).args(args).env_remove("TROPID_SEED").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name).display().to_string()
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p: PathBuf = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

const I3: &str = r#"{"rows": 3, "cols": 3, "entries": [["0", "-inf", "-inf"], ["-inf", "0", "-inf"], ["-inf", "-inf", "0"]]}"#;
const A3: &str = r#"{"rows": 3, "cols": 3, "entries": [["1", "2", "-inf"], ["0", "-1", "3"], ["2", "-inf", "1/2"]]}"#;

#[test]
fn ranks_of_the_identity() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "i3.json", I3);
    let out = tropid(&["rank", "--kind", "tropical", "--input", &input]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "3"));
    let out = tropid(&["rank", "--kind", "factor", "--input", &input, "--output", "-"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((code(&out), &report["value"], &report["kind"]), (0, &3.into(), &"factor_exact".into()));
}

#[test]
fn csr_commands() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "a.json", A3);
    let out = tropid(&["csr", "verify", "--input", &input, "--t", "auto"]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "equal"));
    let out = tropid(&["csr", "verify", "--input", &input, "--t", "9"]);
    assert_eq!(code(&out), 0);
    let out = tropid(&["csr", "certify", "--input", &input]);
    let cert: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(code(&out), 0);
    assert!(cert["certificate"]["sum_of_lengths"].as_u64().unwrap() <= cert["tropical_rank"].as_u64().unwrap());
    // A^6 of this matrix is nonsingular, so the decomposition does not apply.
    assert_eq!(code(&tropid(&["csr", "singular", "--input", &input])), 2);
    let singular = write(&dir, "s.json", r#"{"rows": 2, "cols": 2, "entries": [["0", "0"], ["0", "0"]]}"#);
    let out = tropid(&["csr", "singular", "--input", &singular]);
    let d: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((code(&out), d["terms"].as_array().unwrap().len(), &d["t"]), (0, 1, &4.into()));
    assert_eq!(code(&tropid(&["csr", "verify", "--input", &input, "--t", "soon"])), 2);
}

#[test]
fn commutator_is_refuted_with_artifact() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "abba.json", r#"{"u": "ab", "v": "ba"}"#);
    let artifact = dir.path().join("ce.json");
    let args = ["identity", "check", "--file", &file, "--n", "2", "--trials", "1000", "--seed", "7"];
    let out = tropid(&[&args[..], &["--output", artifact.to_str().unwrap()]].concat());
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&artifact).unwrap()).unwrap();
    assert_eq!(report["seed"], 7);
    assert!(report["counterexample"]["u_value"] != report["counterexample"]["v_value"]);
    // The same run prints the same bytes.
    assert_eq!(tropid(&args).stdout, tropid(&args).stdout);
    assert!(String::from_utf8(out.stderr).unwrap().contains("seed: 7"));
}

#[test]
fn exact_check_proves_and_refutes() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "abba.json", r#"{"u": "ab", "v": "ba"}"#);
    let out = tropid(&["identity", "check", "--file", &file, "--n", "1", "--trials", "200", "--seed", "1", "--exact"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((code(&out), &report["exact"]["verdict"]), (0, &"proved".into()));
    let adjan = write(&dir, "adjan.json", r#"{"u": "abbaababba", "v": "abbabaabba", "monoid": "U2"}"#);
    let out = tropid(&["identity", "check", "--file", &adjan, "--trials", "500", "--seed", "2", "--exact"]);
    assert_eq!(code(&out), 0);
    let out = tropid(&["identity", "check", "--file", &adjan, "--n", "2", "--trials", "0", "--seed", "2", "--exact"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((code(&out), &report["exact"]["verdict"]), (1, &"refuted".into()));
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "abba.json", r#"{"u": "ab", "v": "ba"}"#);
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_tropid"))
            .args(["identity", "check", "--file", &file, "--n", "2", "--trials", "300"])
            .env("TROPID_SEED", "41")
            .output()
            .unwrap()
    };
    let (first, second) = (run(), run());
    assert_eq!(first.stdout, second.stdout);
    assert!(String::from_utf8(first.stderr).unwrap().contains("seed: 41"));
}

#[test]
fn builds_the_three_by_three_identity() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("m3.json");
    let out = tropid(&[
        "identity", "build", "--n", "3", "--variant", "ii", "--base-m2", &fixture("m2.json"), "--base-u3",
        &fixture("u3.json"), "--seed", "4", "--output", target.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let id: serde_json::Value = serde_json::from_str(&fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(id["monoid"], "M3");
    let u: tropid_core::Word = id["u"].as_str().unwrap().parse().unwrap();
    assert_eq!(u.len(), 19656);
    let out = tropid(&[
        "identity", "build", "--n", "3", "--base-prev", &fixture("m2.json"), "--base-tri", &fixture("u3.json"),
        "--t", "1", "--admit-trials", "0",
    ]);
    assert_eq!(code(&out), 2, "below the threshold without the override");
}

#[test]
fn corrupted_base_is_not_admitted() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "m2.json", r#"{"name": "bad", "monoid": "M2", "u": "abab", "v": "baba"}"#);
    let out = tropid(&["identity", "build", "--n", "3", "--base-m2", &bad, "--base-u3", &fixture("u3.json"), "--seed", "1"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8(out.stderr).unwrap().contains("rejected"));
}

#[test]
fn closed_form_length() {
    let dir = TempDir::new().unwrap();
    let params = write(
        &dir,
        "p.json",
        r#"{"n": 3, "variant": "ii", "t": 5, "len_u": 17, "len_v": 17, "b_count_u": 8, "len_p": 10, "len_q_hat": 2, "len_r_hat": 2}"#,
    );
    let out = tropid(&["identity", "length", "--params", &params]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "19656"));
    let broken = write(&dir, "q.json", r#"{"n": 3, "variant": "ii", "t": 5}"#);
    assert_eq!(code(&tropid(&["identity", "length", "--params", &broken])), 2);
}

#[test]
fn separation() {
    let dir = TempDir::new().unwrap();
    let (u, v) = (write(&dir, "u.txt", "ab\n"), write(&dir, "v.txt", "ba\n"));
    let out = tropid(&["separate", "--u", &u, "--v", &v, "--n", "2", "--trials", "500", "--seed", "3"]);
    assert_eq!(code(&out), 1);
    let s: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(s["separator"]["u_weight"] != s["separator"]["v_weight"]);
    let out = tropid(&["separate", "--u", &u, "--v", &v, "--n", "1", "--trials", "200", "--seed", "3"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(code(&tropid(&["frobnicate"])), 2);
    assert_eq!(code(&tropid(&["rank", "--input", "/nonexistent/a.json"])), 2);
    let dir = TempDir::new().unwrap();
    let ragged = write(&dir, "r.json", r#"{"rows": 2, "cols": 2, "entries": [["0"]]}"#);
    assert_eq!(code(&tropid(&["rank", "--input", &ragged])), 2);
    let same = write(&dir, "same.json", r#"{"u": "ab", "v": "ab"}"#);
    assert_eq!(code(&tropid(&["identity", "check", "--file", &same, "--n", "2"])), 2);
}

#[test]
fn quick_selftest_passes() {
    let out = tropid(&["selftest", "--quick", "--seed", "9"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
    assert!(text.contains("10/10 criteria passed"));
}
