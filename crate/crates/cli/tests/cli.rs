use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bpk::{cmd_basis, cmd_subroutine, cmd_validate, cmd_verify, BasisOptions};
use serde_json::Value;
use tempfile::TempDir;

const FIG1B: &str = r#"{"widths":[1,1,1,1,1],"connections":[[2,4],[0,1],[1,2],[2,3],[3,4],[0,2]]}"#;
const MLP: &str = r#"{"widths":[2,2,2],"connections":[[0,1],[1,2]]}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn bpk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpk")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn validate_normalizes() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "net.json", FIG1B);
    let out = bpk(&["validate", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out.stdout);
    assert_eq!(v["connections"], serde_json::json!([[0, 1], [0, 2], [1, 2], [2, 3], [2, 4], [3, 4]]));
}

#[test]
fn validate_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let missing = write(&dir, "missing.json", r#"{"widths":[1,1,1],"connections":[[0,2]]}"#);
    let out = bpk(&["validate", s(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing consecutive connection (0, 1)"));

    let malformed = write(&dir, "bad.json", "{\"widths\": [1,");
    assert_eq!(bpk(&["validate", s(&malformed)]).status.code(), Some(2));

    let unknown = write(&dir, "extra.json", r#"{"widths":[1,1],"connections":[[0,1]],"layers":3}"#);
    assert_eq!(bpk(&["validate", s(&unknown)]).status.code(), Some(2));

    assert_eq!(bpk(&["validate", "/nonexistent/net.json"]).status.code(), Some(2));
}

#[test]
fn weights_are_echoed() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "w.json", r#"{"widths":[1,2],"connections":[[0,1]],"weights":{"0.0->1.1":"-3/4"}}"#);
    let v: Value = serde_json::from_str(&cmd_validate(&f).unwrap()).unwrap();
    assert_eq!(v["weights"]["0.0->1.1"], "-3/4");

    let bad = write(&dir, "bad.json", r#"{"widths":[1,2],"connections":[[0,1]],"weights":{"0.0->1.5":"1"}}"#);
    assert_eq!(bpk(&["validate", s(&bad)]).status.code(), Some(2));
}

#[test]
fn basis_examples() {
    let dir = TempDir::new().unwrap();
    let cases = [(MLP, 6), (FIG1B, 3), (r#"{"widths":[1,1],"connections":[[0,1]]}"#, 1)];
    for (i, (text, size)) in cases.iter().enumerate() {
        let f = write(&dir, &format!("n{i}.json"), text);
        let run = cmd_basis(&f, BasisOptions::default()).unwrap();
        let v: Value = serde_json::from_str(&run.json).unwrap();
        assert_eq!(v["paths"].as_array().unwrap().len(), *size);
        assert_eq!(v["stats"]["basis_size"], *size);
        assert!(v.get("trace").is_none());
    }
}

#[test]
fn basis_then_verify() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "fig.json", FIG1B);
    let b = dir.path().join("basis.json");
    let out = bpk(&["basis", s(&f), "--emit-trace", "--threads", "2", "--out", s(&b)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let timings = json(&out.stderr);
    assert!(timings["wall_seconds"]["bases"].is_number());

    let file = json(&std::fs::read(&b).unwrap());
    assert_eq!(file["paths"][0], serde_json::json!([[0, 0], [1, 0], [2, 0], [3, 0], [4, 0]]));
    assert_eq!(file["trace"]["chains"], serde_json::json!([{"indices": [3, 2]}]));
    assert!(file["trace"]["cross_chain"][0]["sh"].is_array());

    let out = bpk(&["verify", s(&f), s(&b)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out.stdout)["verdict"], "IsBasis");
}

#[test]
fn verify_reports_failures() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "mlp.json", MLP);
    let text = cmd_basis(&f, BasisOptions::default()).unwrap().json;
    let mut file: Value = serde_json::from_str(&text).unwrap();
    let paths = file["paths"].as_array().unwrap().clone();

    file["paths"] = Value::Array(paths[1..].to_vec());
    let short = write(&dir, "short.json", &file.to_string());
    let out = bpk(&["verify", s(&f), s(&short)]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out.stdout);
    assert_eq!(v["verdict"], "NotMaximal");
    assert_eq!(v["gap"], 1);

    let mut dup = paths.clone();
    dup.push(paths[2].clone());
    file["paths"] = Value::Array(dup);
    let long = write(&dir, "long.json", &file.to_string());
    let out = bpk(&["verify", s(&f), s(&long)]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out.stdout);
    assert_eq!(v["verdict"], "NotIndependent");
    assert_eq!(v["witness"]["index"], 6);

    // a path that does not exist in the network is invalid input
    file["paths"] = serde_json::json!([[[0, 0], [2, 0]]]);
    let alien = write(&dir, "alien.json", &file.to_string());
    assert_eq!(bpk(&["verify", s(&f), s(&alien)]).status.code(), Some(2));

    let verdict = cmd_verify(&f, &short).unwrap();
    assert!(!verdict.is_basis());
}

#[test]
fn path_guard_from_environment() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "mlp.json", MLP);
    let b = dir.path().join("b.json");
    assert_eq!(bpk(&["basis", s(&f), "--out", s(&b)]).status.code(), Some(0));

    let run = |cap: &str, args: &[&str]| Command::new(env!("CARGO_BIN_EXE_bpk")).env("BPK_PATH_CAP", cap).args(args).output().unwrap();
    let out = run("5", &["verify", s(&f), s(&b)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard of 5"));
    assert_eq!(run("8", &["verify", s(&f), s(&b)]).status.code(), Some(0));
    assert_eq!(run("8", &["oracle-rank", s(&f)]).status.code(), Some(0));
    assert_eq!(run("7", &["oracle-rank", s(&f)]).status.code(), Some(4));

    let fig = write(&dir, "fig.json", FIG1B);
    assert_eq!(run("3", &["basis", s(&fig)]).status.code(), Some(4));
    assert_eq!(run("3", &["substructures", s(&fig)]).status.code(), Some(4));
    assert_eq!(run("zero", &["basis", s(&fig)]).status.code(), Some(2));
}

#[test]
fn subroutine_subcommand() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "n.json", r#"{"widths":[1,2,1,1],"connections":[[0,1],[1,2],[2,3]]}"#);
    let v: Value = serde_json::from_str(&cmd_subroutine(&f).unwrap()).unwrap();
    assert_eq!(v["paths"], serde_json::json!([[[0, 0], [1, 0], [2, 0], [3, 0]], [[0, 0], [1, 1], [2, 0], [3, 0]]]));
    assert_eq!(v["stats"]["m"], 5);
    assert_eq!(v["stats"]["hidden_nodes"], 3);

    let skip = write(&dir, "skip.json", FIG1B);
    assert_eq!(bpk(&["subroutine", s(&skip)]).status.code(), Some(2));
}

#[test]
fn substructures_and_rank_reports() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "fig.json", FIG1B);
    let out = bpk(&["substructures", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out.stdout);
    let subs = v["substructures"].as_array().unwrap();
    assert_eq!(subs.len(), 4);
    assert_eq!(subs[3]["layers"], serde_json::json!([0, 2, 4]));
    assert_eq!(subs[3]["subdivided_by"], serde_json::json!([0, 1, 2]));
    assert_eq!(v["selection"]["selected"], serde_json::json!([0, 3, 2]));
    assert_eq!(v["selection"]["rank"], 3);

    let out = bpk(&["oracle-rank", s(&f)]);
    let v = json(&out.stdout);
    assert_eq!((v["path_count"].as_u64(), v["rank"].as_u64()), (Some(4), Some(3)));
}

#[test]
fn output_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "n.json", r#"{"widths":[2,3,2,2,3],"connections":[[0,1],[1,2],[2,3],[3,4],[0,2],[1,3],[2,4]]}"#);
    let first = cmd_basis(&f, BasisOptions { emit_trace: true, threads: Some(1) }).unwrap().json;
    for threads in [None, Some(1), Some(3), Some(8)] {
        let again = cmd_basis(&f, BasisOptions { emit_trace: true, threads }).unwrap().json;
        assert_eq!(first, again);
    }
}

#[test]
fn usage_errors() {
    assert_eq!(bpk(&[]).status.code(), Some(2));
    assert_eq!(bpk(&["bogus"]).status.code(), Some(2));
    assert_eq!(bpk(&["--help"]).status.code(), Some(0));
}
