use std::path::Path;
use std::process::{Command, Output};

use llscond::report::{format_sig6, AnalysisReport};
use serde_json::Value;

fn llscond(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_llscond"))
        .args(args)
        .env_remove("LLSCOND_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = llscond(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const EXAMPLE: &str = "alpha=0.1,beta=1,phi=pi/10";

#[test]
fn example_triple_with_exact() {
    let v = json(&["analyze", "--example", EXAMPLE, "--exact"]);
    let c = &v["condition"];
    let upper = c["chi_a_upper"].as_f64().unwrap();
    let exact = c["chi_a_exact"]["value"].as_f64().unwrap();
    let lower = c["chi_a_lower"].as_f64().unwrap();
    assert_eq!(format!("{upper:.3}"), "40.929");
    assert!((upper - 40.928).abs() < 2e-3 && (exact - 35.193).abs() < 2e-3 && (lower - 32.505).abs() < 2e-3);
    assert_eq!(v["provenance"]["seed"], 0);
    assert!(v["provenance"]["version"].is_string());
    assert!(v["example"]["closed_forms"]["kappa"].as_f64().unwrap() == 10.0);
}

#[test]
fn exact_field_absent_without_flag() {
    let v = json(&["analyze", "--example", EXAMPLE]);
    assert!(v["condition"].get("chi_a_exact").is_none());
    assert!(v["condition"]["chi_a_upper"].is_number());
}

#[test]
fn json_round_trips() {
    let out = llscond(&["analyze", "--example", EXAMPLE, "--exact", "--format", "json"]);
    let rep: AnalysisReport = serde_json::from_slice(&out.stdout).unwrap();
    let again = serde_json::to_string_pretty(&rep).unwrap() + "\n";
    assert_eq!(again.as_bytes(), out.stdout.as_slice());
}

fn numbers_in_json(v: &Value, out: &mut Vec<f64>) {
    match v {
        Value::Number(n) => out.push(n.as_f64().unwrap()),
        Value::Array(a) => a.iter().for_each(|x| numbers_in_json(x, out)),
        Value::Object(o) => o.values().for_each(|x| numbers_in_json(x, out)),
        _ => {}
    }
}

#[test]
fn text_numbers_all_appear_in_json() {
    for cmd in [
        vec!["analyze", "--example", EXAMPLE, "--exact"],
        vec!["catalog", "--example", EXAMPLE],
        vec!["perturb", "--example", EXAMPLE, "--trials", "20"],
        vec!["paper-example", "--example", EXAMPLE],
    ] {
        let text = String::from_utf8(llscond(&cmd).stdout).unwrap();
        let mut nums = Vec::new();
        numbers_in_json(&json(&cmd), &mut nums);
        let rendered: Vec<String> = nums
            .iter()
            .flat_map(|&x| [format_sig6(x), (x as i64).to_string()])
            .collect();
        let mut checked = 0;
        for line in text.lines() {
            let Some((key, rest)) = line.split_once(": ") else { continue };
            if key.trim() == "source" || key.trim() == "version" {
                continue;
            }
            for token in rest.trim_matches(|c| c == '[' || c == ']').split(", ") {
                if token.parse::<f64>().is_ok() {
                    assert!(rendered.iter().any(|r| r == token), "{cmd:?}: text value {token} ({key}) not in json");
                    checked += 1;
                }
            }
        }
        assert!(checked > 5, "{cmd:?}");
    }
}

#[test]
fn unit_scales_give_inverse_sigma_min() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mtx");
    let b = dir.path().join("b.vec");
    std::fs::write(&a, "%%MatrixMarket matrix array real general\n3 2\n3\n0\n0\n0\n0.5\n0\n").unwrap();
    std::fs::write(&b, "1\n2\n3\n").unwrap();
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    let v = json(&["analyze", a, b, "--scales", "1,1,1"]);
    assert!((v["condition"]["chi_b"].as_f64().unwrap() - 2.0).abs() < 1e-14);
    assert_eq!(v["provenance"]["scales"], "custom");
}

#[test]
fn perturb_is_deterministic_and_clean() {
    let args = ["perturb", "--example", EXAMPLE, "--trials", "100", "--eps", "1e-8", "--seed", "42", "--format", "json"];
    let first = llscond(&args);
    let second = llscond(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let v: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(v["summary"]["violations"], 0);
    assert_eq!(v["summary"]["trials"], 100);
}

#[test]
fn seed_env_fallback_and_flag_precedence() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_llscond"));
        cmd.args(["perturb", "--example", EXAMPLE, "--trials", "5", "--format", "json"]);
        cmd.env_remove("LLSCOND_SEED");
        if let Some(e) = env {
            cmd.env("LLSCOND_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        let v: Value = serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap();
        v["summary"]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 0);
    assert_eq!(run(Some("7"), None), 7);
    assert_eq!(run(Some("7"), Some("8")), 8);
}

#[test]
fn validation_errors_exit_2_with_json_body() {
    let out = llscond(&["perturb", "--example", EXAMPLE, "--trials", "0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kind"], "validation");
    assert_eq!(v["exit_code"], 2);

    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.vec");
    std::fs::write(&a, "c1,c2\n1,0\n0,1\n1,1\n").unwrap();
    std::fs::write(&b, "1\n2\n").unwrap();
    let out = llscond(&["analyze", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    assert_eq!(llscond(&["analyze"]).status.code(), Some(2));
    assert_eq!(llscond(&["analyze", "--example", "gamma=1"]).status.code(), Some(2));
    assert_eq!(llscond(&["analyze", "--example", EXAMPLE, "--format", "xml"]).status.code(), Some(2));
    let out = llscond(&["analyze", "--example", "alpha=oops", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kind"], "validation");
}

#[test]
fn rank_deficient_input_is_explained() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.vec");
    std::fs::write(&a, "c1,c2\n1,2\n2,4\n3,6\n").unwrap();
    std::fs::write(&b, "1\n2\n3\n").unwrap();
    let out = llscond(&["analyze", a.to_str().unwrap(), b.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["error"].as_str().unwrap().contains("rank"), "{v}");
}

#[test]
fn paper_example_files_reproduce_the_example() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("ex");
    let v = json(&["paper-example", "--example", EXAMPLE, "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(v["closed_forms"]["kappa"], 10.0);
    assert!((v["closed_forms"]["tan_theta"].as_f64().unwrap() - 1.0).abs() < 1e-15);
    let from_files = json(&[
        "analyze",
        out_dir.join("a.mtx").to_str().unwrap(),
        out_dir.join("b.vec").to_str().unwrap(),
    ]);
    let from_example = json(&["analyze", "--example", EXAMPLE]);
    assert_eq!(from_files["condition"], from_example["condition"]);
    assert!(Path::new(&out_dir.join("delta_a.mtx")).exists());
}

#[test]
fn kappa_over_two_limit() {
    let v = json(&["paper-example", "--example", "alpha=0.01,beta=1,phi=pi/2"]);
    let ratio = v["computed"]["overestimate_ratio"].as_f64().unwrap();
    assert!((ratio / 50.0 - 1.0).abs() < 0.03, "{ratio}");
}
