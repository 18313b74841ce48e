use std::fs;
use std::process::{Command, Output};

use supermodular_core::coverage::{build_coverage_objective, load_points};
use supermodular_core::minimize::brute_min;

fn supermod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supermod")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn eval_examples() {
    let o = supermod(&["eval", "--function", "FIG2", "--kind", "S_PLUS", "--point", "0.5,0.5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0.75");
    let o = supermod(&["eval", "--function", "FIG2", "--kind", "CLOSURE", "--point", "1,1"]);
    assert_eq!(stdout(&o), "4");
    let o = supermod(&["eval", "--function", "P17", "--kind", "M_GAMMA", "--point", "0.9,0.9,0.9,0.9"]);
    assert_eq!(stdout(&o), "-0.2");
}

#[test]
fn eval_reads_json_tables() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    fs::write(&path, r#"{"p":2,"values":{"1":0.5,"2":1.5,"3":4}}"#).unwrap();
    let o = supermod(&["eval", "--function", path.to_str().unwrap(), "--kind", "J1", "--point", "0.5,0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "1");
}

#[test]
fn eval_usage_errors() {
    let o = supermod(&["eval", "--function", "NOPE", "--kind", "S", "--point", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = supermod(&["eval", "--function", "FIG2", "--kind", "J3", "--point", "0.5,0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = supermod(&["eval", "--function", "FIG2", "--kind", "S", "--point", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = supermod(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gen_data_examples() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = supermod(&["gen-data", "--n", "400", "--dim", "32", "--k", "10", "--seed", "42", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 400);
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let o = supermod(&["gen-data", "--n", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn experiment_on_line_instance() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("line.csv");
    fs::write(&input, "0\n1\n10\n").unwrap();
    let out = dir.path().join("out");
    let args = [
        "experiment",
        "--input",
        input.to_str().unwrap(),
        "--epsilon",
        "1.5",
        "--budgets",
        "1,2,3",
        "--out",
        out.to_str().unwrap(),
    ];
    let o = supermod(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv_text = fs::read_to_string(out.join("results.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>().join(","),
        "budget,lp_bound_margin,lp_bound_joint,greedy_value,rounded_value_margin,rounded_value_joint,offline_bound,iters_margin,iters_joint,sep_calls_margin,sep_calls_joint"
    );
    let (_, g) = build_coverage_objective(load_points(&input).unwrap(), 1.5).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        let c: usize = r[0].parse().unwrap();
        let best = brute_min(&g, c).unwrap().1;
        for (bound, rounded) in [(1, 4), (2, 5)] {
            let lb: f64 = r[bound].parse().unwrap();
            let rv: f64 = r[rounded].parse().unwrap();
            assert!(lb <= best + 1e-9 && best <= rv, "budget {c}: {lb} <= {best} <= {rv}");
        }
    }
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 3);

    let again = dir.path().join("again");
    let mut args2 = args;
    args2[8] = again.to_str().unwrap();
    assert!(supermod(&args2).status.success());
    assert_eq!(fs::read(out.join("results.csv")).unwrap(), fs::read(again.join("results.csv")).unwrap());
}

#[test]
fn experiment_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = supermod(&["experiment", "--input", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,2\n3\n").unwrap();
    let o = supermod(&["experiment", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = supermod(&["experiment", "--budgets", "3,1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_suites() {
    let o = supermod(&["check", "--suite", "counterexamples"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["passed"], true);

    let o = supermod(&["check", "--suite", "mutation-splus"]);
    assert_eq!(o.status.code(), Some(3));

    let o = supermod(&["check", "--suite", "default", "--seed", "42"]);
    assert!(o.status.success(), "{}", stdout(&o));

    let o = supermod(&["check", "--suite", "bogus"]);
    assert_eq!(o.status.code(), Some(1));
}
