mod common;

use common::{measured, u64s, zdf};
use serde_json::Value;

fn assert_round_trips(stdout: &str) {
    let v: Value = serde_json::from_str(stdout).unwrap();
    let mut again = serde_json::to_string_pretty(&v).unwrap();
    again.push('\n');
    assert_eq!(again, stdout);
    assert_eq!(v["schema_version"], "1");
    assert!(
        !stdout.contains('.'),
        "no floats or dotted strings expected in:\n{stdout}"
    );
}

#[test]
fn construct_p_squared() {
    let r = zdf(&["construct", "--family", "p-squared", "--p", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_round_trips(&r.stdout);
    let v = r.json();
    assert_eq!(v["command"], "construct");
    let inst = &v["results"][0];
    assert_eq!(inst["e"], 2);
    assert_eq!(u64s(&inst["subgroup"]), vec![1, 2, 4, 5, 7, 8]);
    assert_eq!(inst["m"], 3);
    assert_eq!(u64s(&inst["descriptor"]["predicted_s"]), vec![3, 7]);
    assert_eq!(u64s(&inst["table"]), vec![0, 1, 1, 2, 1, 1, 2, 1, 1]);
    let cosets: Vec<Vec<u64>> = inst["cosets"]
        .as_array()
        .unwrap()
        .iter()
        .map(u64s)
        .collect();
    assert_eq!(cosets, vec![vec![0], vec![1, 2, 4, 5, 7, 8], vec![3, 6]]);
}

#[test]
fn construct_rejects_composite_p() {
    let r = zdf(&["construct", "--family", "p-squared", "--p", "4"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("p must be an odd prime"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn missing_and_unknown_arguments_exit_2() {
    let r = zdf(&["verify", "--family", "p-power-minus", "--p", "3"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("missing --k"), "{}", r.stderr);
    assert_eq!(zdf(&["verify", "--family", "nope"]).code, 2);
    assert_eq!(zdf(&["verify"]).code, 2);
    assert_eq!(zdf(&["verify", "--n", "9"]).code, 2);
    assert_eq!(zdf(&["table", "--brute-bound", "1"]).code, 2);
    assert_eq!(zdf(&["table", "--emit", "yaml"]).code, 2);
}

#[test]
fn two_power_example() {
    let r = zdf(&["verify", "--family", "two-power", "--k", "3"]);
    assert_eq!(r.code, 0);
    let rep = &r.json()["results"]["reports"][0];
    assert_eq!(rep["descriptor"]["generator"], 3);
    assert_eq!(measured(rep), (8, 5, vec![0, 2]));
    assert_eq!(rep["verdict"], "PASS");
    assert_eq!(rep["routes_agree"], true);
}

#[test]
fn verify_instance_reports_matched_family() {
    let r = zdf(&["verify", "--n", "9", "--e", "2"]);
    assert_eq!(r.code, 0);
    assert_round_trips(&r.stdout);
    let v = r.json()["results"].clone();
    assert_eq!(v["matched_family"], "P_SQUARED");
    assert_eq!(u64s(&v["S"]), vec![3, 7]);
    assert_eq!(v["verdict"], "PASS");

    let r = zdf(&["verify", "--n", "8", "--e", "7"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["results"]["matched_family"], Value::Null);
}

#[test]
fn expectations_fail_with_exit_1() {
    let r = zdf(&["verify", "--n", "9", "--e", "2", "--expect-s", "3,8"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["results"]["verdict"], "FAIL");
    let r = zdf(&[
        "verify",
        "--family",
        "z4",
        "--expect-m",
        "4",
        "--emit",
        "text",
    ]);
    assert_eq!(r.code, 1);
    assert!(
        r.stdout.contains("PASS Z4") && r.stdout.contains("FAIL Z4"),
        "{}",
        r.stdout
    );
    let r = zdf(&[
        "verify",
        "--n",
        "9",
        "--e",
        "2",
        "--expect-s",
        "7,3",
        "--expect-m",
        "3",
    ]);
    assert_eq!(r.code, 0);
}

#[test]
fn above_brute_bound_only_unions_run() {
    let r = zdf(&[
        "verify",
        "--family",
        "p-squared",
        "--p",
        "11",
        "--brute-bound",
        "100",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep = &r.json()["results"]["reports"][0];
    assert_eq!(rep["direct_checked"], false);
    assert_eq!(rep["routes_agree"], Value::Null);
    assert_eq!(measured(rep), (121, 11, vec![11, 111]));

    let r = zdf(&["spectrum", "--n", "121", "--e", "3", "--brute-bound", "100"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["results"]["direct_checked"], false);
}

#[test]
fn spectrum_output() {
    let r = zdf(&["spectrum", "--n", "4", "--e", "3"]);
    assert_eq!(r.code, 0);
    assert_round_trips(&r.stdout);
    let v = r.json()["results"].clone();
    let per: Vec<(u64, u64)> = v["per_shift"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| (o["a"].as_u64().unwrap(), o["N"].as_u64().unwrap()))
        .collect();
    assert_eq!(per, vec![(1, 0), (2, 2), (3, 0)]);
    assert_eq!(v["classification"], "NONTRIVIAL_ZDF");
    assert_eq!(v["lambda"], Value::Null);

    let r = zdf(&["spectrum", "--n", "7", "--e", "2", "--emit", "csv"]);
    assert_eq!(r.stdout, "a,N\n1,2\n2,2\n3,2\n4,2\n5,2\n6,2\n");
}

#[test]
fn spectrum_rejects_non_units() {
    assert_eq!(zdf(&["spectrum", "--n", "9", "--e", "3"]).code, 2);
    assert_eq!(zdf(&["spectrum", "--n", "9", "--e", "10"]).code, 2);
    assert_eq!(zdf(&["spectrum", "--n", "1", "--e", "0"]).code, 2);
}

#[test]
fn scan_csv_shape() {
    let r = zdf(&["scan", "--n-min", "4", "--n-max", "4", "--emit", "csv"]);
    assert_eq!(r.code, 0);
    assert_eq!(
        r.stdout,
        "n,e,k,m,S,classification,family\n4,1,1,4,0,ZDBF,Z4\n4,3,2,3,0|2,NONTRIVIAL_ZDF,Z4\n"
    );
}

#[test]
fn scan_bounds() {
    assert_eq!(zdf(&["scan", "--n-min", "1", "--n-max", "5"]).code, 2);
    assert_eq!(zdf(&["scan", "--n-min", "9", "--n-max", "5"]).code, 2);
    assert_eq!(
        zdf(&[
            "scan",
            "--n-min",
            "2",
            "--n-max",
            "50",
            "--brute-bound",
            "40"
        ])
        .code,
        2
    );
}

#[test]
fn sequential_and_parallel_outputs_match() {
    let a = zdf(&["scan", "--n-min", "2", "--n-max", "90"]);
    let b = zdf(&["--sequential", "scan", "--n-min", "2", "--n-max", "90"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    assert_round_trips(&a.stdout);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("zdf-cli-test-{}.json", std::process::id()));
    let r = zdf(&["table", "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_round_trips(&written);
    assert_eq!(zdf(&["table", "--out", "/nonexistent-dir/x.json"]).code, 2);
}

#[test]
fn crt_seed_changes_generator_not_parameters() {
    let a = zdf(&[
        "verify", "--family", "p1p2-crt", "--p1", "5", "--p2", "7", "--s1", "2", "--t1", "2",
        "--s2", "3", "--t2", "2",
    ]);
    let b = zdf(&[
        "verify",
        "--family",
        "p1p2-crt",
        "--p1",
        "5",
        "--p2",
        "7",
        "--s1",
        "2",
        "--t1",
        "2",
        "--s2",
        "3",
        "--t2",
        "2",
        "--seed-generator",
        "3",
    ]);
    assert_eq!((a.code, b.code), (0, 0));
    let (ra, rb) = (
        &a.json()["results"]["reports"][0],
        &b.json()["results"]["reports"][0],
    );
    assert_eq!(measured(ra), measured(rb));
    assert_eq!(measured(ra), (35, 9, vec![2, 7, 10]));
    assert_eq!(ra["descriptor"]["parameters"]["g1"], 2);
    assert_eq!(rb["descriptor"]["parameters"]["g1"], 3);
}

#[test]
fn text_table_lists_every_row() {
    let r = zdf(&["table", "--emit", "text"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.lines().filter(|l| l.ends_with("PASS")).count(), 7);
}
