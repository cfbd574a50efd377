use std::process::{Command, Output};

use serde_json::Value;

fn qgrass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgrass"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn homology_vanishes_at_n5() {
    let out = qgrass(&["homology", "--n", "5", "--q", "2", "--mod", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "vanishing-pattern: PASS");
    assert!(v["levels"].as_array().unwrap().iter().all(|l| l["dim_h"] == 0));
}

#[test]
fn homology_rejects_incompatible_modulus() {
    let out = qgrass(&["homology", "--n", "4", "--q", "2", "--mod", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("must divide q+1"));
}

#[test]
fn usage_errors_have_their_own_code() {
    assert_eq!(qgrass(&["bogus"]).status.code(), Some(64));
    assert_eq!(qgrass(&["homology", "--n", "x"]).status.code(), Some(64));
    assert_eq!(qgrass(&["--help"]).status.code(), Some(0));
}

#[test]
fn budget_overrun_is_reported() {
    let out = Command::new(env!("CARGO_BIN_EXE_qgrass"))
        .args(["expansion", "--n", "4", "--k", "1", "--q", "2", "--mod", "3", "--exact"])
        .env("QGRASS_BUDGET_MB", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget exceeded"));
}

#[test]
fn sweep_output_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.path().join(format!("sweep{threads}.csv"));
        let out = qgrass(&[
            "lm-sweep", "--n", "4", "--k", "1", "--q", "2", "--coef", "3", "--grid", "0.05:0.95:0.15",
            "--trials", "200", "--seed", "42", "--threads", threads, "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        files.push(std::fs::read_to_string(path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let mut lines = files[0].lines();
    assert!(lines.next().unwrap().starts_with("# pstar=0.3868643144"));
    assert_eq!(lines.next().unwrap(), "p,trials,connected,phat,ci_lo,ci_hi");
}

#[test]
fn gtable_csv_reports_the_threshold_violation() {
    let out = qgrass(&["gtable", "--n", "3", "--k", "1", "--q", "2", "--mod", "3", "--max-size", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "m,theta,count");
    assert!(rows.contains(&"1,0,14"));
    assert!(rows.contains(&"3,5/9,168"));
}

#[test]
fn expansion_exact_json() {
    let out = qgrass(&["expansion", "--n", "3", "--k", "1", "--q", "2", "--mod", "3", "--exact"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["exact"]["h"], "1/2");
    assert_eq!(v["exact"]["bound"], "1/6");
    assert_eq!(v["exact"]["examined"], 2187);
}

#[test]
fn eta_and_psi_checks_pass() {
    let out = qgrass(&["eta", "--n", "2", "--q", "2", "--mod", "3", "--check", "explicit,recursive,boundary"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["support"], 8);
    assert_eq!(v["explicit_matches_recursive"], true);
    let out = qgrass(&["psi", "--n", "2", "--q", "2", "--mod", "3", "--pairing"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["support"], 6);
    assert_eq!(v["pairing"]["value_is_unit"], true);
}

#[test]
fn cone_check_dumps_a_cone() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("x.json");
    std::fs::write(
        &input,
        r#"{"n":5,"k":1,"m":3,"terms":[{"subspace":{"n":5,"k":1,"rows":[[0,0,0,1,0]]},"coeff":1}]}"#,
    )
    .unwrap();
    let out = qgrass(&[
        "cone-check", "--n", "5", "--k", "1", "--q", "2", "--mod", "3", "--basis", "standard", "--chains", "20",
        "--input", input.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["identity_failures"], 0);
    assert_eq!(v["dump"]["output"]["k"], 2);
}

#[test]
fn general_variant_fails_the_identity_at_level_two() {
    let out = qgrass(&["cone-check", "--n", "5", "--k", "2", "--q", "2", "--mod", "5", "--variant", "general", "--chains", "20"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn indcomplex_and_small_generators() {
    let out = qgrass(&["indcomplex", "--n", "4", "--k", "2", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["sparsity"]["max_intersecting"], 27);
    let out = qgrass(&["small-generators", "--n", "5", "--k", "1", "--q", "2", "--mod", "5"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn repro_subset() {
    let out = qgrass(&["repro", "--only", "1,2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 3);
    assert_eq!(v["all_passed"], true);
}
