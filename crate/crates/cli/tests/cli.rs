use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn intw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intw"))
        .args(args)
        .env_remove("INTW_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = intw(&full);
    let code = out.status.code().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let value = if text.trim().is_empty() { Value::Null } else { serde_json::from_str(&text).unwrap() };
    (code, value)
}

#[test]
fn fusion_exit_codes() {
    let (code, r) = json(&["fusion", "--level", "4", "--finite", "2", "2", "0"]);
    assert_eq!(code, 2);
    assert_eq!(r["result"]["verdict"]["verdict"], "unknown");
    assert_eq!(r["result"]["verdict"]["witnesses"][0]["m"], 2);
    assert_eq!(r["result"]["verdict"]["witnesses"][0]["degree"], 1);

    let (code, r) = json(&["fusion", "--level", "-1/2", "--mixed", "1", "-3/2", "-1/2"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["verdict"]["verdict"], "one");

    let (code, r) = json(&["fusion", "--level", "generic", "--finite", "1", "1", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["verdict"]["verdict"], "one");

    let (code, r) = json(&["fusion", "--level", "1", "--finite", "2", "2", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["verdict"]["verdict"], "zero");

    let (code, r) = json(&["fusion", "--level", "-1/2", "--dense", "0", "-3/8"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["verdict"]["verdict"], "one");

    let (code, r) = json(&["fusion", "--level", "-1/2", "--highest", "-3/4", "-3/4", "-3/2"]);
    assert_eq!(code, 2);
    assert_eq!(r["result"]["verdict"]["witnesses"][0]["m"], -1);

    let (code, r) = json(&["fusion", "--level", "-1/2", "--modules", "finite:1", "hw:-3/2", "hw:-1/2"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["verdict"]["verdict"], "one");
}

#[test]
fn malformed_input_exits_one() {
    assert_eq!(intw(&["fusion", "--level", "x", "--finite", "1", "1", "0"]).status.code(), Some(1));
    assert_eq!(intw(&["fusion", "--level", "-2", "--finite", "1", "1", "0"]).status.code(), Some(1));
    assert_eq!(intw(&["fusion", "--level", "1"]).status.code(), Some(1));
    assert_eq!(intw(&["fusion", "--level", "1+sqrt(2)", "--finite", "1", "1", "0"]).status.code(), Some(1));
    assert_eq!(intw(&["fusion", "--level", "-1/2", "--mixed", "1", "2", "1"]).status.code(), Some(1));
    assert_eq!(intw(&["kz", "--level", "1", "--u1", "bogus", "--u2", "finite:1", "--target", "verma:0"]).status.code(), Some(1));
    let out = intw(&["kz", "--level", "1", "--u1", "finite:1", "--u2", "finite:1", "--target", "verma:1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("is zero"));
}

#[test]
fn kz_examples() {
    let (code, r) = json(&["kz", "--level", "-1/2", "--u1", "finite:1", "--u2", "hw:-3/2", "--target", "verma:-1/2", "-N", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["prefix"]["prefix_degrees"], 4);
    assert_eq!(r["result"]["verification"]["commutator"], true);
    assert_eq!(r["result"]["verification"]["kz_residual"], true);

    let (code, r) = json(&["kz", "--level", "4", "--u1", "finite:2", "--u2", "finite:2", "--target", "verma:0", "-N", "2"]);
    assert_eq!(code, 3);
    assert_eq!(r["result"]["prefix"]["obstruction"]["degree"], 1);
    assert_eq!(r["result"]["prefix"]["prefix_degrees"], 1);
    assert!(r["result"]["prefix"]["maps"].as_array().unwrap().len() == 1);

    let (code, r) =
        json(&["kz", "--level", "4", "--u1", "finite:2", "--u2", "finite:2", "--target", "contragredient:0", "-N", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["prefix"]["prefix_degrees"], 3);
    assert!(r["result"]["prefix"]["obstruction"].is_null());
}

#[test]
fn candidate_examples() {
    let (code, r) = json(&["candidate", "--level", "4", "--p", "2", "--q", "2", "--r", "0"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["is_zero"], true);
    assert_eq!(r["result"]["degree"], 1);

    let (code, r) = json(&["candidate", "--level", "0", "--p", "2", "--q", "3", "--r", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["degree"], 4);
    assert_eq!(r["result"]["conformal_weight"], "35/8");
    for c in r["result"]["candidates"].as_array().unwrap() {
        assert_eq!(c["diagnostics"]["in_radical"], true);
    }

    let (code, r) = json(&["candidate", "--level", "1", "--p", "1", "--q", "2", "--r", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["is_zero"], false);

    let out = intw(&["candidate", "--level", "generic", "--p", "2", "--q", "2", "--r", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no obstruction"));
}

#[test]
fn algebra_validate() {
    let (code, r) = json(&["algebra", "validate"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["adjoint_casimir"], "4");
    assert_eq!(r["algebra"]["name"], "sl2");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "name = \"broken\"\nbasis = [\"x\"]\n").unwrap();
    assert_eq!(intw(&["algebra", "validate", bad.to_str().unwrap()]).status.code(), Some(1));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn batch_queries() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(
        dir.path(),
        "ok.jsonl",
        concat!(
            "{\"level\":\"-1/2\",\"u1\":\"finite:1\",\"u2\":\"hw:-3/2\",\"u3\":\"hw:-1/2\"}\n",
            "# comment\n",
            "{\"level\":\"1\",\"u1\":\"finite:2\",\"u2\":\"finite:2\",\"u3\":\"finite:1\"}\n",
        ),
    );
    let (code, r) = json(&["batch", &ok, "--jobs", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["queries"], 2);
    assert_eq!(r["result"]["results"][1]["line"], 3);
    assert_eq!(r["result"]["results"][1]["verdict"]["verdict"], "zero");

    let mixed = write(
        dir.path(),
        "mixed.jsonl",
        concat!(
            "{\"level\":\"4\",\"u1\":\"finite:2\",\"u2\":\"finite:2\",\"u3\":\"finite:0\"}\n",
            "{\"level\":\"4\",\"u1\":\"finite:2\"}\n",
        ),
    );
    let (code, r) = json(&["batch", &mixed]);
    assert_eq!(code, 1);
    assert_eq!(r["result"]["failed"], 1);
    assert_eq!(r["result"]["results"][0]["verdict"]["verdict"], "unknown");

    let unknown = write(dir.path(), "u.jsonl", "{\"level\":\"4\",\"u1\":\"finite:2\",\"u2\":\"finite:2\",\"u3\":\"finite:0\"}\n");
    assert_eq!(json(&["batch", &unknown]).0, 2);
}

#[test]
fn reports_are_written_and_replay_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["fusion", "--level", "4", "--finite", "2", "2", "0"],
        &["kz", "--level", "4", "--u1", "finite:2", "--u2", "finite:2", "--target", "verma:0", "-N", "2"],
        &["candidate", "--level", "4", "--p", "2", "--q", "2", "--r", "0"],
        &["algebra", "validate"],
    ];
    let expected_codes = [2, 3, 0, 0];
    for (args, code) in cases.iter().zip(expected_codes) {
        let out = Command::new(env!("CARGO_BIN_EXE_intw"))
            .args(*args)
            .env("INTW_OUTPUT_DIR", dir.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(code));
    }
    let mut reports: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    reports.sort();
    assert_eq!(reports.len(), 4);
    for path in reports {
        let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(report["schema"], "intw-report/1");
        assert!(report["config"]["command"].is_string());
        let out = intw(&["replay", "--check", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(report["exit_code"].as_i64().unwrap() as i32), "{}", path.display());
        let again = intw(&["--json", "replay", path.to_str().unwrap()]);
        let text = String::from_utf8(again.stdout).unwrap();
        assert_eq!(format!("{}", text.trim_end()), std::fs::read_to_string(&path).unwrap().trim_end());
    }
}

#[test]
fn explicit_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("nested").join("r.json");
    let out = intw(&["--output", target.to_str().unwrap(), "fusion", "--level", "1", "--finite", "1", "1", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(report["config"]["level"], "1");
    assert_eq!(report["config"]["finite"], serde_json::json!([1, 1, 2]));
}
