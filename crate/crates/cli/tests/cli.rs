use assert_cmd::Command;
use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::cargo_bin("paroper")
        .unwrap()
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let (code, out) = run(&all);
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn gunning_table_has_zero_par_deg() {
    let (code, out) = run(&["gunning", "--curve", &data("p1_three_points.json")]);
    assert_eq!(code, 0);
    assert!(out
        .lines()
        .any(|l| l.starts_with("E ") && l.contains(" 0 ") && l.contains("3/5 2/5")));
    let (code, v) = run_json(&["gunning"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["payload"]["gunning"]["degree"], -3);
}

#[test]
fn sym_four_table() {
    let (code, v) = run_json(&["sym", "--power", "4"]);
    assert_eq!(code, 0);
    let w = &v["payload"]["bundle"]["weights"]["x1"];
    assert_eq!(w, &serde_json::json!(["4/5", "3/5", "2/5", "1/5", "0"]));
    assert_eq!(v["payload"]["bundle"]["degree"], -6);
}

#[test]
fn oracle_check_passes_and_is_deterministic() {
    let args = ["oracle-check", "--seed", "42", "--count", "1000"];
    let (code, first) = run(&args);
    assert_eq!(code, 0);
    assert!(first.contains("1000 of 1000"));
    let (_, second) = run(&args);
    assert_eq!(first, second);
}

#[test]
fn json_output_is_byte_identical() {
    let args = [
        "--json",
        "monodromy",
        "--system",
        &data("rank2_system.json"),
        "--tol",
        "1e-9",
    ];
    let (code, a) = run(&args);
    let (_, b) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(a, b);
}

#[test]
fn monodromy_spectrum_and_product() {
    let sys = data("rank2_system.json");
    let (code, v) = run_json(&[
        "monodromy",
        "--system",
        &sys,
        "--point",
        "x2",
        "--expect",
        "2/5,3/5",
        "--tol",
        "1e-6",
    ]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["payload"]["spectrum_check"]["pass"], true);
    let (code, v) = run_json(&[
        "monodromy",
        "--system",
        &sys,
        "--point",
        "x2",
        "--expect",
        "1/5,3/5",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "fail");
    let (code, v) = run_json(&["monodromy", "--system", &sys, "--irreducibility"]);
    assert_eq!(code, 0);
    assert!(v["payload"]["atlas"]["product_defect"].as_f64().unwrap() < 1e-7);
    assert_eq!(v["payload"]["irreducibility"]["pass"], true);
}

#[test]
fn resonance_is_a_warning() {
    let sys = r#"{"rank": 2, "punctures": [
        {"coordinate": [0, 0], "residue": [[0, 0], [0, 1]]},
        {"coordinate": [1, 0], "residue": [["3/10", 0], [0, "1/10"]]}]}"#;
    let (code, v) = run_json(&["monodromy", "--system", sys, "--point", "x1"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "warning");
    assert!(v["diagnostics"][0]
        .as_str()
        .unwrap()
        .starts_with("warning: resonant"));
}

#[test]
fn operator_commands() {
    let op = data("riemann_model.json");
    let (code, v) = run_json(&["indicial", "--op", &op, "--point", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["exponents"], serde_json::json!(["2/5", "3/5"]));
    let (_, v) = run_json(&["subprincipal", "--op", &op]);
    assert_eq!(v["payload"]["vanishes"], true);
    let (code, v) = run_json(&[
        "oper-check",
        "--curve",
        &data("p1_three_points.json"),
        "--rank",
        "2",
        "--op",
        &op,
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["pass"], true);
    assert_eq!(v["payload"]["exponent_sum"], "1");
}

#[test]
fn library_errors_are_diagnostics() {
    let (code, v) = run_json(&[
        "filtration",
        "--rank",
        "3",
        "--curve",
        r#"{"genus": 0, "points": [{"label": "a", "level": 4}]}"#,
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "fail");
    assert_eq!(v["payload"], Value::Null);
    assert!(v["diagnostics"][0]
        .as_str()
        .unwrap()
        .starts_with("error: a genus-0 curve"));
    let (code, _) = run(&[
        "theta-check",
        "--curve",
        r#"{"genus": 1, "points": [{"label": "a", "level": 4}]}"#,
    ]);
    assert_eq!(code, 1);
    let (code, _) = run(&["indicial", "--op", "/nonexistent.json", "--point", "0"]);
    assert_eq!(code, 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["no-such-command"]).0, 2);
    assert_eq!(run(&["sym"]).0, 2);
    assert_eq!(run(&["xi", "--rank", "many"]).0, 2);
}

#[test]
fn remaining_subcommands_run() {
    let g2 = data("genus2_one_point.json");
    for args in [
        vec!["validate", "--curve", &g2],
        vec!["xi", "--rank", "6"],
        vec!["transversality", "--rank", "5", "--curve", &g2],
        vec!["jets", "--order", "3"],
        vec![
            "diffspace",
            "--source",
            "theta:-1",
            "--target",
            "theta:3",
            "--order",
            "2",
        ],
        vec!["oper-operators", "--rank", "3"],
        vec!["theta-check", "--curve", &g2],
        vec!["regrep", "--curve", &g2],
    ] {
        let (code, v) = run_json(&args);
        assert_eq!(code, 0, "{args:?}: {v}");
        assert_eq!(v["status"], "ok", "{args:?}");
    }
}
