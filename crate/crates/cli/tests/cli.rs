use std::path::Path;
use std::process::Command;

use gbc_cli::{ops, run_cli, Manifest, Operation};
use gbc_core::geometry::CatalogSpec;
use serde_json::Value;

fn run(args: &[&str]) -> i32 {
    run_cli(std::iter::once("gbc").chain(args.iter().copied()))
}

fn read_report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn records(report: &Value) -> &Vec<Value> {
    report["records"].as_array().unwrap()
}

#[test]
fn identities_pass_and_record_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ids.json");
    let code = run(&[
        "verify-identities",
        "--n",
        "4",
        "--trials",
        "10",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report = read_report(&out);
    assert_eq!(report["seed"], 7);
    assert_eq!(report["all_pass"], true);
    assert!(records(&report).len() >= 15);
    for r in records(&report) {
        assert!(r["anchor"].as_str().is_some_and(|a| !a.is_empty()));
        assert_eq!(r["pass"], true, "{r}");
    }
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let bodies: Vec<String> = (0..2)
        .map(|_| {
            let out = dir.path().join("report.json");
            let code = run(&[
                "variation",
                "--n",
                "3",
                "--k",
                "1",
                "--quad-order",
                "8",
                "--seed",
                "3",
                "--out",
                out.to_str().unwrap(),
            ]);
            assert_eq!(code, 0);
            let mut v = read_report(&out);
            v.as_object_mut().unwrap().remove("timing");
            serde_json::to_string(&v).unwrap()
        })
        .collect();
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn variation_from_manifest_file() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("sphere3.json");
    std::fs::write(
        &manifest,
        r#"{"manifold": {"id": "sphere", "n": 3, "r": 1.0}, "k": [1], "operation": "variation",
            "numeric": {"quad_order": 10}, "direction": {"kind": "conformal", "seed": 2}}"#,
    )
    .unwrap();
    let out = dir.path().join("out.json");
    assert_eq!(
        run(&[
            "variation",
            "--manifest",
            manifest.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let report = read_report(&out);
    let main = &records(&report)[0];
    assert!(main["values"]["rel_err"].as_f64().unwrap() <= 1e-3);
    assert_eq!(report["manifest"]["numeric"]["seed"], 0);
}

#[test]
fn gauss_bonnet_on_the_two_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gb.json");
    assert_eq!(
        run(&["gauss-bonnet", "--n", "2", "--out", out.to_str().unwrap()]),
        0
    );
    let report = read_report(&out);
    let round = &records(&report)[0]["values"];
    assert!(
        (round["value"].as_f64().unwrap() - 4.0 * std::f64::consts::PI).abs()
            <= 1e-6 * 4.0 * std::f64::consts::PI
    );
    assert!(
        records(&report)[1]["values"]["max_deviation"]
            .as_f64()
            .unwrap()
            <= 1e-4
    );
}

#[test]
fn csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("inv.csv");
    assert_eq!(
        run(&[
            "invariants",
            "--n",
            "3",
            "--k",
            "1",
            "--format",
            "csv",
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("record,anchor,key,value,tolerance,pass,error"));
    assert!(text
        .lines()
        .any(|l| l.starts_with("H_2 integral,") && l.contains(",closed_form,")));
}

#[test]
fn invalid_manifests_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["invariants", "--n", "4", "--k", "3"]), 2);
    let path = dir.path().join("m.json");
    std::fs::write(
        &path,
        r#"{"manifold": {"id": "sphere", "n": 3, "r": 1.0}, "operation": "einstein"}"#,
    )
    .unwrap();
    assert_eq!(run(&["variation", "--manifest", path.to_str().unwrap()]), 2);
    std::fs::write(
        &path,
        r#"{"operation": "variation", "numeric": {"seed": 1, "extra": true}}"#,
    )
    .unwrap();
    assert_eq!(run(&["variation", "--manifest", path.to_str().unwrap()]), 2);
    assert_eq!(
        run(&[
            "variation",
            "--manifest",
            dir.path().join("missing.json").to_str().unwrap()
        ]),
        2
    );
    assert_eq!(run(&["gauss-bonnet", "--n", "3"]), 2);
    assert_eq!(run(&["no-such-command"]), 2);
}

#[test]
fn failed_checks_exit_with_one() {
    // A tolerance no computation can meet.
    assert_eq!(
        run(&[
            "gauss-bonnet",
            "--n",
            "2",
            "--amplitude",
            "0.2",
            "--tol",
            "1e-300",
            "--out",
            "/dev/null"
        ]),
        1
    );
}

#[test]
fn numerical_breakdown_is_recorded_not_raised() {
    // Bypasses validation to reach the library with an order it rejects.
    let mut manifest = Manifest::new(Operation::Invariants);
    manifest.manifold = Some(CatalogSpec::Sphere { n: 3, r: 1.0 });
    manifest.k = vec![1, 2];
    let report = ops::run(manifest);
    assert_eq!(report.exit_code(), 3);
    assert!(report.records.iter().any(|r| r.pass));
    assert!(report.records.iter().any(|r| r.error.is_some()));
}

#[test]
fn binary_honors_thread_cap_and_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_gbc");
    let ok = Command::new(bin)
        .args(["einstein", "--trials", "5"])
        .env("GBC_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["all_pass"], true);
    let bad = Command::new(bin)
        .args(["einstein"])
        .env("GBC_THREADS", "-3")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
