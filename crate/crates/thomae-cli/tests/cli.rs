use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn thomae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thomae")).args(args).output().expect("binary runs")
}

fn verify(plan: &str) -> Output {
    thomae(&["verify", fixture(plan).to_str().unwrap()])
}

fn records(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("JSON line")).collect()
}

#[test]
fn hyperelliptic_plan_passes() {
    let out = verify("plan_hyper.json");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out);
    let count = |task: &str| recs.iter().filter(|r| r["task"] == task).count();
    assert_eq!(
        (count("thomae_const_hyp"), count("thomae_deriv_hyp"), count("quotient_hyp"), count("matrix_form_hyp")),
        (10, 6, 5, 10)
    );
    assert!(recs.iter().all(|r| r["pass"] == true));
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("PASS") && summary.contains("seed=7"));
}

#[test]
fn trigonal_plan_passes() {
    let out = verify("plan_trig.json");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out);
    let count = |task: &str| recs.iter().filter(|r| r["task"] == task).count();
    assert_eq!(count("thomae_const_trig"), 60);
    assert_eq!(count("alpha_estimate"), 1);
    assert_eq!(count("thomae_deriv_trig_t1"), 30);
    assert_eq!(count("thomae_deriv_trig_t2"), 20);
    assert_eq!(count("quotient_trig"), 5);
    assert_eq!(count("matrix_form_trig"), 30);
    assert_eq!(count("simple_zero_trig"), 80);
}

#[test]
fn verify_output_is_byte_identical_across_runs() {
    let first = verify("plan_hyper.json");
    let second = verify("plan_hyper.json");
    assert!(!first.stdout.is_empty());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn out_flag_writes_the_same_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.jsonl");
    let out = thomae(&["verify", fixture("plan_hyper.json").to_str().unwrap(), "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), verify("plan_hyper.json").stdout);
}

#[test]
fn seed_flag_changes_only_the_random_samples() {
    let a = records(&verify("plan_hyper.json"));
    let out = thomae(&["verify", fixture("plan_hyper.json").to_str().unwrap(), "--seed", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let b = records(&out);
    let pick = |recs: &[serde_json::Value], task: &str| -> Vec<serde_json::Value> {
        recs.iter().filter(|r| r["task"] == task).map(|r| r["lhs"].clone()).collect()
    };
    assert_eq!(pick(&a, "thomae_const_hyp"), pick(&b, "thomae_const_hyp"));
    assert_ne!(pick(&a, "quotient_hyp"), pick(&b, "quotient_hyp"));
}

#[test]
fn verification_failure_exits_one() {
    let out = verify("plan_tight.json");
    assert_eq!(out.status.code(), Some(1));
    assert!(records(&out).iter().any(|r| r["pass"] == false));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}

#[test]
fn parse_failures_exit_two() {
    assert_eq!(verify("plan_unknown.json").status.code(), Some(2));
    assert_eq!(verify("no_such_plan.json").status.code(), Some(2));
    assert_eq!(thomae(&["periods", fixture("malformed.json").to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(thomae(&["theta", "--tau", "[[0, 1]"]).status.code(), Some(2));
    assert_eq!(thomae(&["verify", fixture("plan_hyper.json").to_str().unwrap(), "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn invalid_inputs_exit_three() {
    let out = thomae(&["periods", fixture("duplicate.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not distinct"));
    assert_eq!(thomae(&["theta", "--tau", "[[[0, -1]]]"]).status.code(), Some(3));
}

#[test]
fn task_for_the_wrong_cover_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    let curve = std::fs::read_to_string(fixture("hyper_g2.json")).unwrap();
    std::fs::write(&plan, format!(r#"{{"curve": {curve}, "tasks": [{{"id": "thomae_const_trig"}}]}}"#)).unwrap();
    assert_eq!(thomae(&["verify", plan.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn periods_reports_invariants() {
    let out = thomae(&["periods", fixture("hyper_g2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["genus"], 2);
    assert_eq!(v["invariants_hold"], true);
    assert_eq!(v["tau"].as_array().unwrap().len(), 2);
}

#[test]
fn theta_at_i() {
    let out = thomae(&["theta", "--tau", "[[[0, 1]]]"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let re = v["value"][0].as_f64().unwrap();
    assert!((re - 1.086_434_811_213_308).abs() < 1e-13, "{re}");
    let odd = thomae(&["theta", "--tau", "[[[0, 1]]]", "--char", "1; 1"]);
    let v: serde_json::Value = serde_json::from_slice(&odd.stdout).unwrap();
    assert!(v["value"][0].as_f64().unwrap().abs() < 1e-13);
}
