use assert_cmd::Command;
use predicates::prelude::*;
use serde_json::Value;

fn qel() -> Command {
    Command::cargo_bin("qel").unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = qel().args(args).assert().success().get_output().stdout.clone();
    String::from_utf8(out).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&all)).unwrap()
}

#[test]
fn branch_eval_outside_domain() {
    let v = json(&["branch", "eval", "--sig", "+-", "--t", "0.5"]);
    assert_eq!(v["rows"][0]["defined"], Value::Bool(false));
    assert!(v["rows"][0]["value"].is_null());
    assert_eq!(v["meta"]["command"], "branch eval");
    assert_eq!(v["meta"]["parameters"]["sig"], "+-");
}

#[test]
fn branch_point_and_at_two() {
    let v = json(&["branch", "point", "--sig", "--+"]);
    let t = v["rows"][0]["t_sigma"].as_f64().unwrap();
    assert!((t - 1.7549).abs() < 1e-4);
    let v = json(&["branch", "at-two", "--sig", "+--+-"]);
    assert!(v["rows"][0]["difference"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn entropy_rows() {
    assert_eq!(stdout(&["entropy", "--t", "2", "--depth", "20"]), "t,depth,h\n2.000000000000,20,0.693147180560\n");
    // At t = 1 the estimate is log(20) / 10: finite-depth bias, not entropy.
    assert_eq!(stdout(&["entropy", "--t", "1", "--depth", "10", "--precision", "3"]), "t,depth,h\n1.000,10,0.300\n");
}

#[test]
fn staircase_rows_are_sorted_and_reach_the_top() {
    let out = stdout(&["staircase", "--n", "4", "--steps", "400", "--refine-jumps"]);
    let rows: Vec<(f64, u64)> = out
        .lines()
        .skip(1)
        .map(|l| {
            let (t, s) = l.split_once(',').unwrap();
            (t.parse().unwrap(), s.parse().unwrap())
        })
        .collect();
    assert!(rows.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
    assert_eq!(rows.last().unwrap().1, 16);
    // Grid rows plus both ends of each of the 5 jumps, minus ends on grid points.
    assert!(rows.len() > 401 && rows.len() <= 411);
}

#[test]
fn output_is_deterministic() {
    let args = ["darklines", "--max-n", "5", "--steps", "50"];
    assert_eq!(stdout(&args), stdout(&args));
    let a = stdout(&["bifurcation", "--steps", "20", "--samples", "8", "--threads", "1"]);
    let b = qel()
        .args(["bifurcation", "--steps", "20", "--samples", "8", "--seed", "7"])
        .env("QEL_THREADS", "2")
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    assert_eq!(a.as_bytes(), &b[..]);
}

#[test]
fn darklines_and_bifurcation_shapes() {
    let out = stdout(&["darklines", "--max-n", "3", "--steps", "4"]);
    assert_eq!(out.lines().next(), Some("t,n,P_n(t)"));
    assert_eq!(out.lines().count(), 1 + 5 * 3);
    let v = json(&["bifurcation", "--t-min", "1", "--t-max", "1.5", "--steps", "1", "--transient", "10", "--samples", "4"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    // t = 1 is superstable of period 2: the critical orbit alternates 1, 0.
    for r in &rows[..4] {
        let x = r["x"].as_f64().unwrap();
        assert!(x == 0.0 || x == 1.0);
    }
}

#[test]
fn superstable_commands() {
    let v = json(&["superstable", "solve", "--cycle", "+-C"]);
    assert!((v["rows"][0]["t"].as_f64().unwrap() - 1.754877666).abs() < 1e-9);
    let out = stdout(&["superstable", "enumerate", "--period", "5"]);
    assert_eq!(out.lines().count(), 4);
    assert!(out.starts_with("period,cycle,t\n"));
    qel().args(["superstable", "audit", "--max-period", "8"]).assert().success();
    qel()
        .args(["superstable", "solve", "--cycle", "+++C"])
        .assert()
        .code(1)
        .stderr(predicate::str::contains("not realized"));
}

#[test]
fn misiurewicz_and_critical_poly() {
    let out = stdout(&["misiurewicz", "--h", "3", "--T", "1", "--t-min", "1"]);
    assert_eq!(out, "h,T,t\n3,1,1.543689012692\n");
    let out = stdout(&["critical-poly", "--n", "4"]);
    let coeffs: Vec<&str> = out.lines().skip(1).map(|l| l.split_once(',').unwrap().1).collect();
    assert_eq!(coeffs, ["0", "1", "-1", "2", "-5", "6", "-6", "4", "-1"]);
}

#[test]
fn multimodal_entropy_from_map_file() {
    let map = concat!(env!("CARGO_MANIFEST_DIR"), "/golden/bimodal.map");
    let v = json(&["multimodal", "entropy", "--map", map, "--depth", "6"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[1]["l_n"], 3);
    for r in &rows[1..] {
        assert!(r["h_n"].as_f64().unwrap() <= 3f64.ln() + 1e-12);
    }
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    qel()
        .args(["entropy", "--t", "2", "--output", path.to_str().unwrap()])
        .assert()
        .success()
        .stdout("");
    assert!(std::fs::read_to_string(path).unwrap().starts_with("t,depth,h\n"));
}

#[test]
fn argument_errors_exit_two() {
    for args in [
        &["entropy", "--t", "3"][..],
        &["entropy", "--t", "1", "--depth", "99"],
        &["branch", "eval", "--sig", "+x", "--t", "1"],
        &["staircase", "--n", "2", "--t-min", "1", "--t-max", "0.5"],
        &["multimodal", "entropy", "--map", "/nonexistent/map"],
        &["reproduce", "table9"],
        &["frobnicate"],
    ] {
        qel().args(args).assert().code(2).stdout("");
    }
}

#[test]
fn reproduce_targets_match_golden_files() {
    for target in ["table1", "table2", "table3", "fig6"] {
        let out = stdout(&["reproduce", target]);
        assert!(!out.contains("false"), "{target}:\n{out}");
    }
    let v = json(&["reproduce", "fig6"]);
    let incs: Vec<i64> = v["rows"].as_array().unwrap().iter().map(|r| r["increment"].as_i64().unwrap()).collect();
    assert_eq!(incs, [2, 6, 2, 4, 2]);
}
