use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qtower_cli::record::ScanRecord;
use qtower_cli::scan::{run_scan, Checkpoint, ScanOptions};
use serde_json::Value;

fn qtower(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtower"))
        .args(args)
        .env_remove("QTOWER_CHECKPOINT_DIR")
        .output()
        .expect("binary runs")
}

fn json_lines(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/scan_record.schema.json");
    let s: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&s).expect("schema compiles")
}

#[test]
fn classify_first_example() {
    let o = qtower(&["classify", "19176"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["label"], "a1");
    assert_eq!(v["verdict"], "AtLeast3");
    assert_eq!(v["assignment"], serde_json::json!([8, 17, -47, -3]));
}

#[test]
fn classify_factor_expression_matches_integer() {
    let a = qtower(&["classify", "8*17*-3*-47"]);
    let b = qtower(&["classify", "19176"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn classify_with_octic_input() {
    let o = qtower(&["classify", "6072", "--octic-cl2", "2,4,4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["label"], "c3");
    assert_eq!(v["verdict"], "Exactly2_By8Rank");
}

#[test]
fn classify_exit_codes() {
    assert_eq!(qtower(&["classify", "15"]).status.code(), Some(2));
    assert_eq!(qtower(&["classify", "12"]).status.code(), Some(2));
    assert_eq!(qtower(&["classify", "8*17*-3*-5"]).status.code(), Some(2));
    assert_eq!(qtower(&["classify", "abc"]).status.code(), Some(2));
}

#[test]
fn classify_text_format() {
    let o = qtower(&["classify", "19176", "--format", "text"]);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("case a1"));
    assert!(s.contains("AtLeast3"));
}

#[test]
fn conic_unit_classgroup() {
    let v = &json_lines(&qtower(&["conic", "8", "17"]))[0];
    assert_eq!((v["a"].as_i64(), v["b"].as_i64(), v["c"].as_i64()), (Some(5), Some(1), Some(1)));

    let v = &json_lines(&qtower(&["conic", "-3", "217"]))[0];
    let (a, b, c) = (v["a"].as_i64().unwrap(), v["b"].as_i64().unwrap(), v["c"].as_i64().unwrap());
    assert_eq!(a * a, -3 * b * b + 217 * c * c);

    let v = &json_lines(&qtower(&["unit", "12"]))[0];
    assert_eq!(v["unit"], "2+1*sqrt(3)");
    assert_eq!(v["norm"], 1);
    assert_eq!(v["delta"], 6);

    let v = &json_lines(&qtower(&["classgroup", "-23"]))[0];
    assert_eq!(v["elementary_divisors"], serde_json::json!([3]));
    let v = &json_lines(&qtower(&["classgroup", "19176", "--narrow"]))[0];
    assert_eq!(v["two_sylow"], serde_json::json!([2, 2, 2]));
}

#[test]
fn verify_row_reports_match() {
    let o = qtower(&["verify-row", "19176"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_lines(&o)[0]["all_match"], true);
}

#[test]
fn group_commands() {
    let o = qtower(&["group", "build-64150", "--check", "prop11"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    assert_eq!(lines[0]["order"], 64);
    assert_eq!(lines[1]["check"], "prop11");
    assert_eq!(lines[1]["pass"], true);

    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("g.txt");
    let o = qtower(&["group", "build-64150", "--export", table.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = qtower(&["group", "load", table.to_str().unwrap()]);
    assert_eq!(json_lines(&o)[0]["derived_order"], 8);
    let o = qtower(&["group", "check-prop12", "--table", table.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_lines(&o)[0]["pass"], true);

    let o = qtower(&["group", "check-prop11", "--builtin", "cover128"]);
    assert_eq!(o.status.code(), Some(0));

    fs::write(&table, "2\n0 1\n1 1\n").unwrap();
    assert_eq!(qtower(&["group", "load", table.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn scan_includes_first_example_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.jsonl");
    let csv = dir.path().join("scan.csv");
    let o = qtower(&[
        "scan",
        "--min",
        "5",
        "--max",
        "30000",
        "--verify",
        "--output",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let validator = schema();
    let mut found = false;
    let mut prev = 0;
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert!(validator.is_valid(&v), "{line}");
        let r = ScanRecord::from_line(line).unwrap();
        assert_eq!(r.to_line(), line);
        assert!(r.d > prev);
        prev = r.d;
        let tabulated = matches!(r.case_type.as_deref(), Some("I") | Some("II"));
        let expected = if tabulated { Some(true) } else { None };
        assert_eq!(r.verification.as_ref().map(|v| v.all_match), expected, "{line}");
        if r.d == 19176 {
            assert_eq!(r.label.as_deref(), Some("a1"));
            found = true;
        }
    }
    assert!(found);
    let summary: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert_eq!(summary["records"].as_u64().unwrap() as usize, text.lines().count());
    let rows = csv::Reader::from_path(&csv).unwrap().records().count();
    assert_eq!(rows, text.lines().count());
}

#[test]
fn scan_filter_and_empty_range() {
    let o = qtower(&["scan", "--min", "5", "--max", "30000", "--case", "c2"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|v| v["label"] == "c2"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty.jsonl");
    let o = qtower(&["scan", "--min", "10", "--max", "20", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&out).unwrap().len(), 0);
}

#[test]
fn scan_bounds() {
    assert_eq!(qtower(&["scan", "--min", "20", "--max", "10"]).status.code(), Some(2));
    assert_eq!(qtower(&["scan", "--min", "1", "--max", "100000000"]).status.code(), Some(5));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("q.toml");
    fs::write(&cfg, "[scan]\nmax_bound = 1000\n").unwrap();
    let o = qtower(&["scan", "--min", "1", "--max", "2000", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn scan_is_deterministic_across_thread_counts() {
    let a = qtower(&["scan", "--min", "5", "--max", "20000", "--threads", "1"]);
    let b = qtower(&["scan", "--min", "5", "--max", "20000", "--threads", "4", "--chunk", "777"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn scan_resumes_from_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let o = ScanOptions {
        min: 5,
        max: 20000,
        cases: vec![],
        verify: false,
        timing: false,
        chunk: 1000,
        threads: None,
    };
    let full = dir.path().join("full.jsonl");
    run_scan(&o, &full, None, None).unwrap();
    let reference = fs::read_to_string(&full).unwrap();

    // Fake an interruption after the chunk ending at 10004 with a torn trailing line.
    let out = dir.path().join("part.jsonl");
    let cp_path = dir.path().join("cp.json");
    let done: Vec<&str> = reference.lines().filter(|l| ScanRecord::from_line(l).unwrap().d <= 10004).collect();
    let mut prefix = done.iter().map(|l| format!("{l}\n")).collect::<String>();
    let bytes = prefix.len() as u64;
    let mut histogram = std::collections::BTreeMap::new();
    for l in &done {
        *histogram.entry(ScanRecord::from_line(l).unwrap().label.unwrap()).or_insert(0) += 1;
    }
    prefix.push_str("{\"d\":100");
    fs::write(&out, prefix).unwrap();
    let cp = Checkpoint {
        version: qtower_cli::scan::CHECKPOINT_VERSION,
        min: 5,
        max: 20000,
        cases: vec![],
        verify: false,
        next: 10005,
        output_bytes: bytes,
        csv_bytes: None,
        records: done.len() as u64,
        histogram,
    };
    fs::write(&cp_path, serde_json::to_string(&cp).unwrap()).unwrap();

    let summary = run_scan(&o, &out, None, Some(&cp_path)).unwrap();
    assert_eq!(summary.resumed_from, Some(10005));
    assert_eq!(fs::read_to_string(&out).unwrap(), reference);
    assert_eq!(summary.records as usize, reference.lines().count());

    let other = ScanOptions { verify: true, ..o.clone() };
    assert!(run_scan(&other, &out, None, Some(&cp_path)).is_err());
}
