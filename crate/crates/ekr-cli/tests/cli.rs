//! End-to-end tests against the compiled binary: exit codes, report JSON,
//! certificate replay, the enumeration cache, and thread determinism.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ekr() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ekr"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn strong_mode_reports_failure_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let group = write(dir.path(), "g.json", r#"{"kind":"named","name":"heisenberg","params":{"p":3}}"#);
    let out = ekr()
        .args(["--group", &group, "--mode", "strong"])
        .args(["--subgroup-gens", "[[[1,1,0],[0,1,0],[0,0,1]]]"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report = json_stdout(&out);
    assert_eq!(report["group_order"], 27);
    assert_eq!(report["max_clique"], 3);
    assert_eq!(report["weak"], true);
    assert_eq!(report["strong"], "false");
    assert_eq!(report["witness"]["kind"], "non_canonical_max_clique");
}

#[test]
fn weak_mode_holds_for_sl2_f3_line_stabilizer() {
    let dir = tempfile::tempdir().unwrap();
    let group = write(
        dir.path(),
        "g.json",
        r#"{"kind":"matrix","field":{"p":3,"k":1},"dim":2,"determinant_one":true,
            "generators":[[[1,1],[0,1]],[[1,0],[1,1]]]}"#,
    );
    let gens = write(dir.path(), "h.json", "[[[1,1],[0,1]]]");
    let out = ekr()
        .args(["--group", &group, "--subgroup", &gens, "--mode", "weak"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["group_order"], 24);
    assert_eq!(report["stabilizer_size"], 3);
    assert_eq!(report["weak"], true);
    assert_eq!(report["strong"], "not_computed");
}

#[test]
fn survey_quaternion8_passes_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let group = write(dir.path(), "g.json", r#"{"kind":"named","name":"quaternion8","params":{}}"#);
    let out = ekr().args(["--group", &group, "--mode", "survey"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["group_order"], 8);
    assert_eq!(report["group_weak"], true);
    assert_eq!(report["group_strong"], "true");
    // one class per subgroup: Q8 has 6 subgroups, all normal
    assert_eq!(report["classes"].as_array().unwrap().len(), 6);
}

#[test]
fn survey_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let group = write(dir.path(), "g.json", r#"{"kind":"named","name":"symmetric","params":{"n":4}}"#);
    let out1 = dir.path().join("t1.json");
    let out4 = dir.path().join("t4.json");
    for (threads, path) in [("1", &out1), ("4", &out4)] {
        let out = ekr()
            .args(["--group", &group, "--mode", "survey", "--threads", threads])
            .args(["--output", path.to_str().unwrap()])
            .output()
            .unwrap();
        // some point stabilizers of S4 genuinely fail, hence exit 1
        assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out4).unwrap());
}

#[test]
fn witness_construction_and_replay_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let out = ekr()
        .args(["--mode", "witness", "--witness", "psl2", "--params", "q=5"])
        .args(["--output", cert.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = ekr().args(["--mode", "witness", "--cert", cert.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_stdout(&out)["verified"], true);
}

#[test]
fn tampered_certificate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = ekr()
        .args(["--mode", "witness", "--witness", "heisenberg", "--params", "p=3"])
        .args(["--output", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let mut cert: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    cert["set_size"] = Value::from(99);
    std::fs::write(&path, serde_json::to_string(&cert).unwrap()).unwrap();
    let out = ekr().args(["--mode", "witness", "--cert", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_inputs_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"kind":"permutation","degree":3}"#);
    let out = ekr().args(["--group", &bad, "--mode", "weak"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));

    let out = ekr().args(["--mode", "weak"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64)); // no --group

    let out = ekr().args(["--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));

    let out = ekr().args(["--mode", "witness", "--witness", "no-such-witness"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn enumeration_cache_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let group = write(dir.path(), "g.json", r#"{"kind":"named","name":"symmetric","params":{"n":4}}"#);
    let run = || {
        ekr()
            .args(["--group", &group, "--mode", "weak"])
            .args(["--subgroup-gens", "[[1,0,2,3]]"])
            .env("EKR_CACHE_DIR", &cache)
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(first.status.code(), Some(0));
    let entries: Vec<_> = std::fs::read_dir(&cache).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let second = run();
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn corrupt_cache_entry_falls_back_to_fresh_build() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    std::fs::create_dir_all(&cache).unwrap();
    let group = write(dir.path(), "g.json", r#"{"kind":"named","name":"cyclic","params":{"n":6}}"#);
    let run = || {
        ekr()
            .args(["--group", &group, "--mode", "weak", "--subgroup-gens", "[[2,3,4,5,0,1]]"])
            .env("EKR_CACHE_DIR", &cache)
            .output()
            .unwrap()
    };
    assert_eq!(run().status.code(), Some(0));
    for entry in std::fs::read_dir(&cache).unwrap() {
        std::fs::write(entry.unwrap().path(), "not json").unwrap();
    }
    let out = run();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json_stdout(&out)["group_order"], 6);
}

#[test]
fn spot_check_witnesses_report_verified() {
    for (name, params) in [("unipotent-lemma", "q=3"), ("charpoly-galois", "n=2&q=4")] {
        let mut cmd = ekr();
        cmd.args(["--mode", "witness", "--witness", name]);
        for kv in params.split('&') {
            cmd.args(["--params", kv]);
        }
        let out = cmd.output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json_stdout(&out)["verified"], true);
    }
}
