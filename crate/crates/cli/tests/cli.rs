//! End-to-end runs of the binary: outputs, exit codes and JSON shape.

use std::process::{Command, Output};

use hecke_cells::report::{render_all, Report};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke-cells"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn ball_growth() {
    let o = run(&["ball", "--radius", "2", "--type", "C2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "1 3 5\n");
    let o = run(&["ball", "--radius", "2", "--type", "G2"]);
    assert_eq!(stdout(&o), "1 3 5\n");
}

#[test]
fn kl_expansion() {
    let o = run(&["kl", "101", "--weights", "a=2,b=2,c=1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "C[101] = T[101] + (q^-2)*T[10] + (q^-2)*T[01] + (-q^-1 + q^-3)*T[1] + (q^-4)*T[0] + (-q^-3 + q^-5)*T[e]\n"
    );
}

#[test]
fn t_basis_product() {
    let o = run(&[
        "mult",
        "21",
        "102",
        "--basis",
        "T",
        "--weights",
        "a=5,b=1,c=2",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "T[21]*T[102] = (q^1 - q^-1)*T[2102] + (q^5 - q^-5)*T[02] + T[0]\n"
    );
}

#[test]
fn c_basis_product_of_generators() {
    // C_s C_s = (q_s + q_s^-1) C_s, and s0 carries weight c
    let o = run(&["mult", "0", "0", "--basis", "C", "--weights", "a=3,b=1,c=2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "C[0]*C[0] = (q^2 + q^-2)*C[0]\n");
}

#[test]
fn decomposition_region() {
    let o = run(&[
        "verify",
        "decomposition",
        "--region",
        "C2:1:i",
        "--weights",
        "a=5,b=1,c=2",
        "--max-len",
        "12",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).ends_with("# 0 failed\n"));
}

#[test]
fn assumptions_with_extra_condition() {
    let o = run(&[
        "verify",
        "assumptions",
        "--region",
        "C2:1:vii",
        "--weights",
        "a=2,b=3,c=1",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("ass:iv PASS"));
}

#[test]
fn conjecture_subset() {
    let o = run(&[
        "verify",
        "conjectures",
        "--set",
        "P1,P6,P14",
        "--weights",
        "a=1,b=1,c=1",
        "--radius",
        "8",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    for p in ["P1 PASS", "P6 PASS", "P14 PASS"] {
        assert!(text.contains(p), "{p} missing from\n{text}");
    }
}

#[test]
fn config_errors_exit_2() {
    for args in [
        &["ball", "--type", "B3"][..],
        &["kl", "101", "--weights", "a=1,b=2"],
        &[
            "verify",
            "assumptions",
            "--region",
            "G2:1:i",
            "--type",
            "C2",
        ],
        &["verify", "conjectures", "--set", "P99"],
        &["report", "--type", "C2"],
        &["report", "--region", "C2:9:x", "--out-dir", "unused"],
        &["cells", "--inner-radius", "10", "--radius", "8"],
        &["kl", "013"],
    ] {
        let o = run(args);
        assert_eq!(
            code(&o),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn beyond_search_radius_exits_3() {
    let o = run(&["avalue", "0120120", "--radius", "4"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("exceeds the search radius"));
}

#[test]
fn unwritable_out_dir_exits_4() {
    let o = run(&[
        "report",
        "--region",
        "C2:4:i",
        "--out-dir",
        "/proc/hecke-cells-test",
    ]);
    assert_eq!(code(&o), 4);
}

#[test]
fn report_writes_matrix() {
    let dir = std::env::temp_dir().join(format!("hecke-cells-report-{}", std::process::id()));
    let o = run(&[
        "report",
        "--region",
        "G2:3:iii",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let matrix = std::fs::read_to_string(dir.join("matrix-G2.txt")).unwrap();
    assert!(matrix.contains("G2:3:iii"));
    let json: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("matrix-G2.json")).unwrap())
            .unwrap();
    assert!(json["rows"].as_array().is_some_and(|r| r.len() == 1));
    assert!(dir.join("avalues").join("G2_3_iii.txt").exists());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn json_matches_text() {
    let args = ["verify", "assumptions", "--region", "C2:2:i"];
    let text = stdout(&run(&args));
    let json = run(&[&args[..], &["--format", "json"]].concat());
    assert_eq!(code(&json), 0);
    let doc: Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(doc["config"]["region"], "C2:2:i");
    assert_eq!(doc["config"]["command"], "verify assumptions");
    let reports: Vec<Report> = doc["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| Report {
            id: e["id"].as_str().unwrap().into(),
            scope: e["scope"].as_str().unwrap().into(),
            weights: e["weights"].as_str().unwrap().into(),
            radius: e["radius"].as_u64().unwrap() as usize,
            status: serde_json::from_value(e["status"].clone()).unwrap(),
            count: e["counts"]["checked"].as_u64().unwrap() as usize,
            failures: e["counts"]["failed"].as_u64().unwrap() as usize,
            caveats: serde_json::from_value(e["caveats"].clone()).unwrap(),
            witnesses: serde_json::from_value(e["witnesses"].clone()).unwrap(),
        })
        .collect();
    assert_eq!(render_all(&reports), text);
}

#[test]
fn runs_are_deterministic() {
    let args = [
        "cells",
        "--weights",
        "a=2,b=1",
        "--type",
        "G2",
        "--inner-radius",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0, "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn identities_mismatch_does_not_fail() {
    let o = run(&["verify", "identities", "--region", "C2:1:v"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}
