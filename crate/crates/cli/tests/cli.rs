use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn xratio(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xratio"))
        .args(args)
        .output()
        .expect("run xratio")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn expand_prints_the_image() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "a.txt", "# three points\n1\n2\n\n3\n");
    let out = xratio(&["expand", "--set-file", &f, "--function", "f"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("|f(A)| = 6"));
    let values: Vec<&str> = lines.collect();
    assert_eq!(values, vec!["-4", "-4/3", "-3/4", "-1/4", "1/3", "3"]);

    let out = xratio(&["expand", "--set-file", &f, "--function", "g", "--json"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["image_count"], 0);
    assert_eq!(doc["skipped"], 81);
}

#[test]
fn duplicate_values_are_rejected_with_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "dup.txt", "1\n2/2\n");
    let out = xratio(&["expand", "--set-file", &f, "--function", "f"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn caps_give_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let values: String = (1..=41).map(|i| format!("{i}\n")).collect();
    let f = write(dir.path(), "big.txt", &values);
    let out = xratio(&["expand", "--set-file", &f, "--function", "h"]);
    assert_eq!(out.status.code(), Some(2));
    let out = xratio(&[
        "scan",
        "--family",
        "ap",
        "--sizes",
        "4,200",
        "--function",
        "g",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn energy_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "a.txt", "0\n1\n2\n4\n7\n");
    for order in ["1", "2", "3"] {
        let run = |method: &str| -> Value {
            let out = xratio(&[
                "energy",
                "--order",
                order,
                "--method",
                method,
                "--set-file",
                &f,
            ]);
            assert_eq!(out.status.code(), Some(0));
            serde_json::from_slice(&out.stdout).unwrap()
        };
        let (d, p) = (run("direct"), run("dual"));
        assert_eq!(d["energy"], p["energy"]);
        assert_eq!(d["method"], "direct");
        assert!(d["image_count"].as_u64() >= d["lower_bound"].as_u64());
    }
}

#[test]
fn dual_check_reports_the_plane_census() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "a.txt", "0\n1\n2\n");
    let out = xratio(&["dual-check", "--set-file", &f]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["plane_count"], 9);
    assert_eq!(doc["triples"]["triples"], 84);
    assert_eq!(doc["triples"]["line"], 6);
    assert_eq!(doc["triples"]["lines_share_source_or_target"], true);
    assert_eq!(doc["labels_injective"], true);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn scan_is_reproducible_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| -> (String, Value) {
        let csv = dir.path().join(name);
        let out = xratio(&[
            "scan",
            "--family",
            "random",
            "--seed",
            "9",
            "--sizes",
            "6,8,10,12",
            "--function",
            "g",
            "--fit",
            "pure",
            "--csv",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        (
            std::fs::read_to_string(csv).unwrap(),
            serde_json::from_slice(&out.stdout).unwrap(),
        )
    };
    let strip = |text: &str| -> Vec<String> {
        text.lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    let (a, fit) = run("a.csv");
    let (b, _) = run("b.csv");
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(
        a.lines().next(),
        Some("family,kind,n,function,image_count,skipped,elapsed_ms")
    );
    assert_eq!(a.lines().count(), 5);
    assert_eq!(fit["fit"]["model"], "pure_power");
    assert_eq!(fit["fit"]["points"], 4);
}

#[test]
fn scan_json_and_custom_family() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "a.txt", "5\n-1/2\n3\n8\n");
    let out = xratio(&[
        "scan",
        "--family",
        "custom",
        "--set-file",
        &f,
        "--sizes",
        "3,4",
        "--function",
        "f",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc[0]["kind"], "custom_file");
    assert_eq!(doc[1]["n"], 4);
    assert!(doc[0].get("tuple_count").is_none());
}

#[test]
fn fitting_needs_three_sizes() {
    let out = xratio(&[
        "scan",
        "--family",
        "gp",
        "--sizes",
        "4,5",
        "--function",
        "f",
        "--fit",
        "pure",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_family_parameters_fail() {
    let out = xratio(&[
        "scan",
        "--family",
        "gp",
        "--ratio",
        "1",
        "--sizes",
        "4",
        "--function",
        "f",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
