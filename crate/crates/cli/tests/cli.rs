use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn centext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_centext"))
        .args(args)
        .env_remove("CENTEXT_BUDGET")
        .output()
        .expect("binary runs")
}

fn catalogue(file: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/catalogue")
        .join(file)
        .display()
        .to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn schur_of_z2_z4() {
    let out = centext(&[
        "--format",
        "text",
        "schur",
        "--group",
        &catalogue("z2z4.grp"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "[2]\n");
    let out = centext(&["schur", "--group", "z2z4"]);
    assert_eq!(json(&out)["result"]["multiplier"], serde_json::json!([2]));
}

#[test]
fn ktilde_of_z3_squared() {
    let out = centext(&["ktilde", "--group", &catalogue("z3sq.grp"), "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert_eq!(r["order"], 27);
    assert_eq!(r["h2_order"], 3);
    assert_eq!(r["structure"]["exponent"], 3);
    assert_eq!(r["structure"]["is_abelian"], false);
    assert_eq!(r["structure"]["centre_order"], 3);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["ktilde", "--group", "q8", "--cover", "q8-self", "--n", "3"];
    let a = centext(&args);
    let b = centext(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = json(&a);
    assert!(report["inputs"]["group"]["sha256"].as_str().unwrap().len() == 64);
    assert!(report["version"].is_string());
}

#[test]
fn verify_all_up_to_81() {
    let out = centext(&["verify", "--suite", "all", "--max-order", "81"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let r = json(&out);
    let outcomes = r["result"]["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), centext::lab::claims().len());
    let ids: Vec<&str> = outcomes
        .iter()
        .map(|o| o["claim"].as_str().unwrap())
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert!(outcomes.iter().all(|o| o["verdict"] != "fail"));
}

#[test]
fn assumed_multiplier_is_reported() {
    let out = centext(&["ktilde", "--group", "a5", "--cover", "a5-sl25", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["result"]["order"], 7200);
    assert_eq!(r["assumptions"].as_array().unwrap().len(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(
        centext(&["k", "--group", "no/such/file.grp", "--n", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        centext(&["k", "--group", "s3", "--n", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        centext(&["ktilde", "--group", "d4", "--n", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        centext(&["natural-cover", "--group", "z2sq"]).status.code(),
        Some(2)
    );
    assert_eq!(
        centext(&["verify", "--suite", "no-such-claim"])
            .status
            .code(),
        Some(2)
    );
    let out = centext(&["--budget", "100", "k", "--group", "s3", "--n", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    let out = Command::new(env!("CARGO_BIN_EXE_centext"))
        .args(["k", "--group", "s3", "--n", "4"])
        .env("CENTEXT_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn cover_base_must_match_group() {
    let out = centext(&[
        "ktilde", "--group", "z2z4", "--cover", "z2sq-d4", "--n", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_cover_is_a_verification_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z4-over-z2.cov");
    std::fs::write(
        &path,
        "pi: 0 -> 0\n\n[total]\nkind: abelian\ndivisors: 4\n\n[base]\nkind: abelian\ndivisors: 2\n",
    )
    .unwrap();
    let group = dir.path().join("z2.grp");
    std::fs::write(&group, "kind: abelian\ndivisors: 2\n").unwrap();
    let out = centext(&[
        "cover",
        "--group",
        group.to_str().unwrap(),
        "--cover",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["valid"], false);
}
