use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

fn dsge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/solution_record.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn records(out: &Output) -> Vec<Value> {
    let v = validator();
    stdout(out)
        .lines()
        .map(|line| {
            let rec: Value = serde_json::from_str(line).unwrap();
            let errors: Vec<String> = v.iter_errors(&rec).map(|e| e.to_string()).collect();
            assert!(errors.is_empty(), "{line}\n{errors:?}");
            rec
        })
        .collect()
}

fn num(rec: &Value, key: &str) -> f64 {
    rec[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {rec}"))
}

#[test]
fn kink_record_matches_the_csch_fixture() {
    let out = dsge(&["solve", "--eta", "0.1", "--phi", "0", "--branch", "abs-min", "--method", "mobius"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rec = &records(&out)[0];
    let k = 1.4f64.sqrt();
    assert!((num(rec, "S") - 1.1).abs() < 1e-14);
    assert!((num(rec, "r") - k).abs() < 1e-14);
    assert!(num(rec, "f3").abs() < 1e-14);
    assert!((rec["f0"]["im"].as_f64().unwrap().abs() - k).abs() < 1e-12);
    // f = (b/c)/ζ with |b/c| = √(1 + 4η)
    assert!(num(rec, "a").abs() < 1e-14 && num(rec, "d").abs() < 1e-14);
    assert!(((num(rec, "b") / num(rec, "c")).abs() - k).abs() < 1e-12);
    assert!(num(rec, "max_residual") < 1e-12);
    assert!(rec["flags"].as_array().unwrap().is_empty());
}

#[test]
fn records_carry_seventeen_digits() {
    let out = dsge(&["solve", "--eta", "0.1"]);
    let text = stdout(&out);
    let s_field = text.split("\"S\":").nth(1).unwrap().split(',').next().unwrap();
    let mantissa = s_field.split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{s_field}");
}

#[test]
fn half_pi_above_a_quarter_is_an_obstruction() {
    let out = dsge(&["solve", "--eta", "0.5", "--phi", "1.5707963", "--method", "system57"]);
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_str(stderr(&out).trim()).unwrap();
    assert_eq!(err["error"], "obstruction");
    assert!(err["message"].as_str().unwrap().contains("r^2 = 1 - 4 eta = -1"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn half_pi_below_a_quarter_solves() {
    let out = dsge(&["solve", "--eta", "0.1", "--phi", "1.5707963", "--method", "system57"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rec = &records(&out)[0];
    assert!(num(rec, "max_residual") < 1e-8);
}

#[test]
fn tilted_sine_gordon_kink_has_energy_eight() {
    let out = dsge(&["solve", "--eta", "0", "--phi", "0.785398", "--method", "mobius"]);
    assert!(out.status.success());
    let rec = &records(&out)[0];
    assert!((num(rec, "energy") - 8.0).abs() < 1e-8, "{rec}");
}

#[test]
fn methods_agree() {
    let run = |method: &str| records(&dsge(&["solve", "--eta", "0.3", "--phi", "0.7", "--method", method]))[0].clone();
    let (m, s) = (run("mobius"), run("system57"));
    for key in ["S", "a", "b", "c", "d", "r", "energy"] {
        assert!((num(&m, key) - num(&s, key)).abs() < 1e-8, "{key}: {} vs {}", m[key], s[key]);
    }
    let classical = records(&dsge(&["solve", "--eta", "0.3", "--method", "classical"]))[0].clone();
    let mobius = records(&dsge(&["solve", "--eta", "0.3"]))[0].clone();
    assert!((num(&classical, "energy") - num(&mobius, "energy")).abs() < 1e-8);
}

#[test]
fn bubble_record_has_no_finite_asymptote() {
    let out = dsge(&["solve", "--eta", "0.5", "--branch", "rel-min", "--method", "classical"]);
    assert!(out.status.success());
    let rec = &records(&out)[0];
    assert!(rec["f3"].is_null());
    assert_eq!(rec["branch"], "rel-min");
}

#[test]
fn missing_branch_exits_two() {
    let out = dsge(&["solve", "--eta", "0.1", "--branch", "rel-min"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_str(stderr(&out).trim()).unwrap();
    assert_eq!(err["error"], "no-such-branch");
}

#[test]
fn classical_needs_a_special_phase() {
    let out = dsge(&["solve", "--eta", "0.1", "--phi", "0.3", "--method", "classical"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn profile_csv_is_bit_stable() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for p in &paths {
        let out = dsge(&["solve", "--eta", "0.2", "--phi", "0.4", "--profile", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,theta,dtheta_ds,residual"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2001);
    let r = num(&records(&dsge(&["solve", "--eta", "0.2", "--phi", "0.4"]))[0], "r");
    assert!((rows[0][0] + 10.0 / r).abs() < 1e-8 && (rows[2000][0] - 10.0 / r).abs() < 1e-8);
    assert!(rows.iter().all(|row| row[3] < 1e-8));
    let first = text.lines().nth(1).unwrap();
    assert!(first.split(',').all(|x| x.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count() == 9));
}

#[test]
fn degrees_change_display_only() {
    let rad = records(&dsge(&["solve", "--eta", "0.2", "--phi", "0.4"]))[0].clone();
    let deg = records(&dsge(&["--degrees", "solve", "--eta", "0.2", "--phi", "0.4"]))[0].clone();
    assert!((num(&deg, "phi") - 0.4f64.to_degrees()).abs() < 1e-12);
    assert_eq!(rad["a"], deg["a"]);
}

#[test]
fn case_two_sweep_is_smooth() {
    let out = dsge(&["sweep", "--eta", "0.1", "--phi-from", "0", "--phi-to", "1.5707963267948966", "--steps", "32"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let recs = records(&out);
    assert_eq!(recs.len(), 32);
    for r in &recs {
        assert!(r["flags"].as_array().unwrap().is_empty(), "{r}");
        assert!(r["jump"].as_f64().unwrap_or(0.0) < 0.5);
    }
}

#[test]
fn cold_sweep_matches_warm_sweep() {
    let base = ["sweep", "--eta", "0.1", "--steps", "12"];
    let warm = records(&dsge(&base));
    let cold = records(&dsge(&[&base[..], &["--cold-start"]].concat()));
    let seq = records(&dsge(&[&base[..], &["--cold-start", "--sequential"]].concat()));
    assert_eq!(cold, seq);
    for (w, c) in warm.iter().zip(&cold) {
        for key in ["a", "b", "c", "d", "r", "S"] {
            assert!((num(w, key) - num(c, key)).abs() < 1e-8);
        }
    }
}

#[test]
fn case_three_sweep_stops_at_the_obstruction() {
    let out = dsge(&["sweep", "--eta", "0.5", "--steps", "32"]);
    assert_eq!(out.status.code(), Some(3));
    let recs = records(&out);
    assert_eq!(recs.len(), 32);
    let last = recs.last().unwrap();
    assert!(last["flags"].as_array().unwrap().iter().any(|f| f == "obstruction"));
    assert!(last["note"].as_str().unwrap().contains("last converged phi"));
    assert!(recs[0]["flags"].as_array().unwrap().is_empty());
}

#[test]
fn two_step_sweep_has_two_records() {
    let out = dsge(&["sweep", "--eta", "0.1", "--steps", "2"]);
    assert_eq!(records(&out).len(), 2);
}

#[test]
fn verify_passes_quickly() {
    let start = Instant::now();
    let out = dsge(&["verify"]);
    assert!(out.status.success(), "{}{}", stdout(&out), stderr(&out));
    assert!(start.elapsed() < Duration::from_secs(60));
    let text = stdout(&out);
    assert!(text.contains("typo ledger:"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_json_lists_checks() {
    let out = dsge(&["verify", "--json", "--sequential"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["passed"], true);
    let checks = doc["checks"].as_array().unwrap();
    assert!(checks.len() >= 5);
    assert!(checks.iter().all(|c| c["passed"] == true));
    assert!(!doc["ledger"].as_array().unwrap().is_empty());
}

#[test]
fn injected_sign_flip_is_named() {
    let out = dsge(&["verify", "--inject-sign-flip"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("regeneration"), "{}", stderr(&out));
}

#[test]
fn ledger_and_classify_print() {
    let out = dsge(&["ledger", "--json"]);
    let items: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(items.as_array().unwrap().iter().all(|e| e["printed"] != e["implemented"]));

    let out = dsge(&["classify", "--eta", "0.5", "--phi", "0"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["regime"], "case3");
    assert!((doc["rel-min"]["S"].as_f64().unwrap() + 0.5).abs() < 1e-12);
}

#[test]
fn energy_reports_flag_the_bubble_formula() {
    let out = dsge(&["energy", "--eta", "0.5", "--kind", "bubble"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["flagged"], true);

    let out = dsge(&["energy", "--eta", "0.3", "--phi", "0.7"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["difference"].as_f64().unwrap().abs() < 1e-6);
}
