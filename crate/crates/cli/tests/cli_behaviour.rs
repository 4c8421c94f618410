use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn qam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qam")).args(args).output().expect("failed to spawn qam")
}

fn ds(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn exit_codes() {
    let d312 = ds("dataset_312.txt");
    assert_eq!(qam(&["predict", &d312, "--given", "3 1 2"]).status.code(), Some(0));
    assert_eq!(qam(&["predict", &d312]).status.code(), Some(1));
    assert_eq!(qam(&["predict", &d312, "--given", "3 1 2", "--format", "yaml"]).status.code(), Some(1));
    assert_eq!(qam(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qam(&["--help"]).status.code(), Some(0));
    assert_eq!(qam(&["--version"]).status.code(), Some(0));

    let wrong = qam(&["predict", &d312, "--given", "3 1"]);
    assert_eq!(wrong.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&wrong.stderr).contains("does not match given context length"));

    let missing = qam(&["predict", &ds("no_such_file.txt"), "--given", "3 1 2"]);
    assert_eq!(missing.status.code(), Some(2));

    assert_eq!(qam(&["predict", &d312, "--given", "3 1 2", "--max-vars", "2"]).status.code(), Some(3));
    assert_eq!(qam(&["predict", &d312, "--given", "3 1 2", "--max-vars", "31"]).status.code(), Some(1));

    let long: Vec<&str> = std::iter::repeat_n("a", 21).collect();
    let mut args = vec!["natstat", "decide"];
    args.extend(&long);
    assert_eq!(qam(&args).status.code(), Some(3));
    args.extend(["--monte-carlo", "--trials", "1000"]);
    assert_eq!(qam(&args).status.code(), Some(0));
    assert_eq!(qam(&["natstat", "decide", "s", "--r", "3/2"]).status.code(), Some(1));
}

#[test]
fn validate_reports() {
    let ok = qam(&["validate", &ds("dataset_312.txt"), "--given", "3 1 2"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok), "ok\n");

    let broken = qam(&["validate", &ds("arity_broken.txt"), "--given", "3 1 2"]);
    assert_eq!(broken.status.code(), Some(2));
    assert_eq!(stdout(&broken), "occurrence 2 has 2 variables, expected 3\n");
}

#[test]
fn empty_dataset_predicts_null() {
    let v = json_of(&qam(&["predict", &ds("empty.txt"), "--given", "a b", "--format", "json"]));
    assert_eq!(v["distribution"]["outcomes"], Value::Array(vec![]));
    assert_eq!(v["distribution"]["null"]["num"], 1);
    assert_eq!(v["distribution"]["null"]["den"], 1);
    assert_eq!(v["wave"], Value::Null);
}

#[test]
fn single_occurrence_gives_one_table() {
    let v = json_of(&qam(&["trace", &ds("single.txt"), "--given", "3 1 2", "--format", "json"]));
    assert_eq!(v["steps"].as_array().unwrap().len(), 1);
    let text = stdout(&qam(&["trace", &ds("single.txt"), "--given", "3 1 2"]));
    assert_eq!(text.matches("\nstep ").count(), 1);
}

#[test]
fn same_seed_same_bytes() {
    let d312 = ds("dataset_312.txt");
    let runs = [
        vec!["predict", &d312, "--given", "3 1 2", "--format", "json", "--draws", "500", "--seed", "3"],
        vec!["natstat", "predict-imperfect", &d312, "--given", "3 1 2", "--monte-carlo", "--trials", "2000", "--seed", "9", "--format", "json"],
        vec!["natstat", "variance", "s s t s t t s t", "--monte-carlo", "--trials", "5000", "--seed", "4", "--format", "json"],
    ];
    for args in runs {
        let a = qam(&args);
        let b = qam(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let c = qam(&["predict", &d312, "--given", "3 1 2", "--format", "json", "--draws", "500", "--seed", "4"]);
    let a = qam(&["predict", &d312, "--given", "3 1 2", "--format", "json", "--draws", "500", "--seed", "3"]);
    assert_ne!(a.stdout, c.stdout);
}

/// Pulls `token<TAB>num/den  decimal` lines out of a text report.
fn text_rationals(text: &str) -> Vec<(String, String, String)> {
    text.lines()
        .filter_map(|l| {
            let (name, rest) = l.split_once('\t')?;
            let (q, dec) = rest.split_once("  ")?;
            Some((name.to_owned(), q.to_owned(), dec.to_owned()))
        })
        .collect()
}

fn json_fraction(v: &Value) -> String {
    if v["den"] == 1 {
        v["num"].to_string()
    } else {
        format!("{}/{}", v["num"], v["den"])
    }
}

#[test]
fn text_and_json_agree() {
    let d312 = ds("dataset_312.txt");
    for extra in [&["--r", "1/2"][..], &["--r", "0.3"], &["--r", "1"]] {
        let mut base = vec!["natstat", "predict-imperfect", d312.as_str(), "--given", "3 1 2"];
        base.extend(extra);
        let text = stdout(&qam(&base));
        base.extend(["--format", "json"]);
        let v = json_of(&qam(&base));
        let mut from_json: Vec<(String, String, String)> = v["distribution"]["outcomes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|o| {
                let p = &o["probability"];
                (o["outcome"].as_str().unwrap().to_owned(), json_fraction(p), p["decimal"].as_str().unwrap().to_owned())
            })
            .collect();
        let null = &v["distribution"]["null"];
        if null["num"] != 0 {
            from_json.push(("∅".into(), json_fraction(null), null["decimal"].as_str().unwrap().to_owned()));
        }
        // the settings line `r<TAB>1/2` carries no decimal and is skipped
        assert_eq!(text_rationals(&text), from_json);
    }

    let text = stdout(&qam(&["natstat", "variance", "s s s t"]));
    let v = json_of(&qam(&["natstat", "variance", "s s s t", "--format", "json"]));
    let rows = text_rationals(&text);
    assert_eq!(rows.len(), 6);
    for (key, q, dec) in rows {
        let key = key.as_str();
        assert_eq!(json_fraction(&v[key]), q, "{key}");
        assert_eq!(v[key]["decimal"], dec.as_str(), "{key}");
    }
}

#[test]
fn final_trace_table_equals_predict_lattice() {
    for (file, given) in [("dataset_312.txt", "3 1 2"), ("dataset_312.txt", "0 3 2"), ("single.txt", "3 1 0")] {
        let t = json_of(&qam(&["trace", &ds(file), "--given", given, "--format", "json"]));
        let p = json_of(&qam(&["predict", &ds(file), "--given", given, "--format", "json"]));
        let mut last = t["steps"].as_array().unwrap().last().unwrap()["cells"].clone();
        for cell in last.as_array_mut().unwrap() {
            cell.as_object_mut().unwrap().remove("include");
        }
        assert_eq!(last, p["lattice"]);
    }
}

#[test]
fn include_matrix_flag_does_not_change_results() {
    let d312 = ds("dataset_312.txt");
    let full = json_of(&qam(&["predict", &d312, "--given", "3 1 2", "--format", "json"]));
    let lean = json_of(&qam(&["predict", &d312, "--given", "3 1 2", "--format", "json", "--no-include-matrix"]));
    for key in ["lattice", "analogical_set", "pointers", "distribution", "wave", "agreement"] {
        assert_eq!(full[key], lean[key], "{key}");
    }
    assert_eq!(lean["input"]["config"]["retain_include_matrix"], false);
}

#[test]
fn given_file_matches_given_flag() {
    let d312 = ds("dataset_312.txt");
    let given_file = ds("given_312.txt");
    let a = qam(&["predict", &d312, "--given", "3 1 2"]);
    let b = qam(&["predict", &d312, "--given-file", &given_file]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(qam(&["predict", &d312, "--given", "3 1 2", "--given-file", &given_file]).status.code(), Some(1));
}

#[test]
fn timing_is_opt_in() {
    let d312 = ds("dataset_312.txt");
    let plain = json_of(&qam(&["predict", &d312, "--given", "3 1 2", "--format", "json"]));
    assert!(plain.get("timing").is_none());
    let timed = json_of(&qam(&["predict", &d312, "--given", "3 1 2", "--format", "json", "--timing"]));
    assert!(timed["timing"]["elapsed_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn natstat_examples() {
    let d = json_of(&qam(&["natstat", "decide", "s s s t", "--r", "1/2", "--format", "json"]));
    let masses: Vec<String> = d["decision"]["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| json_fraction(&o["probability"]))
        .collect();
    assert_eq!(masses, ["25/32", "5/32"]);
    assert_eq!(json_fraction(&d["decision"]["null"]), "1/16");

    let sst = "s s t s t t s t s s t t t s t t t s t t";
    let v = json_of(&qam(&["natstat", "variance", sst, "--r", "1", "--format", "json"]));
    assert_eq!(v["empirical_variance"]["num"], 0);

    let p = json_of(&qam(&[
        "natstat", "predict-imperfect", &ds("dataset_312.txt"), "--given", "3 1 2", "--r", "1", "--format", "json",
    ]));
    let got: Vec<String> = p["distribution"]["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| json_fraction(&o["probability"]))
        .collect();
    assert_eq!(got, ["4/13", "9/13"]);
}

#[test]
fn cross_check_is_clean() {
    let out = qam(&["cross-check", &ds("dataset_312.txt"), "--given", "3 1 2", "--format", "json"]);
    let v = json_of(&out);
    assert_eq!(v["mismatches"], Value::Array(vec![]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);
}
