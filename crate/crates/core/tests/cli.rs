use qquery::cli::{run, EXIT_OK, EXIT_PARSE, EXIT_USAGE};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qquery").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn analyze_andor2_optimum() {
    let (code, out, _) = call(&["analyze", "--circuit", "builtin:ANDOR2", "--theta", "0.074909", "--property", "andor:2", "--Q", "3"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["p_error_max"].as_f64().unwrap() - 0.287315).abs() < 5e-6);
    assert_eq!(v["verdict"]["better_than_classical"], Value::Bool(true));
    assert_eq!(v["sidedness"], "two-sided");
    assert_eq!(v["per_function"].as_array().unwrap().len(), 16);
    let fs: Vec<&str> = v["per_function"].as_array().unwrap().iter().map(|r| r["f"].as_str().unwrap()).collect();
    let mut sorted = fs.clone();
    sorted.sort();
    assert_eq!(fs, sorted);
}

#[test]
fn threshold_prints_six_digits() {
    let (code, out, _) = call(&["threshold", "--q", "1", "--Q", "1.5", "--sided", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "0.166667");
}

#[test]
fn missing_file_names_the_path() {
    let (code, _, err) = call(&["analyze", "--circuit", "nonexistent.qc", "--property", "or"]);
    assert_ne!(code, EXIT_OK);
    assert!(err.contains("nonexistent.qc"), "{err}");
}

#[test]
fn usage_and_parse_errors() {
    assert_eq!(call(&["analyze", "--nope"]).0, EXIT_USAGE);
    assert_eq!(call(&["threshold", "--q", "1", "--Q", "2", "--sided", "3"]).0, EXIT_USAGE);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qc");
    std::fs::write(&bad, "qubits 2\noracle-arity 1\ngate FROB 0\n").unwrap();
    let (code, _, err) = call(&["analyze", "--circuit", bad.to_str().unwrap(), "--property", "or"]);
    assert_eq!(code, EXIT_PARSE);
    assert!(err.contains("3"), "line number reported: {err}");
}

#[test]
fn file_circuit_round_trip_and_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("or.qc");
    std::fs::write(&file, qquery::serialize_program(&qquery::Builtin::Or.program(0.0))).unwrap();
    let json = dir.path().join("report.json");
    let (code, out, _) =
        call(&["analyze", "--circuit", file.to_str().unwrap(), "--property", "or", "--json", json.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let stdout: Value = serde_json::from_str(&out).unwrap();
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(stdout, written);
    assert_eq!(written["sidedness"], "one-sided-on-0");
    assert!((written["p_error_max"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn dfp_csv() {
    let (code, out, _) = call(&["dfp", "--depth", "1", "--root", "OR"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines, ["assignment,expected_queries,expected_queries_float", "00,2/1,2", "01,3/2,1.5", "10,3/2,1.5", "11,1/1,1"]);
}

#[test]
fn tune_gram_and_sample() {
    let (code, out, _) = call(&["tune", "--template", "OR"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["p_error_max"].as_f64().unwrap() - 0.1).abs() < 1e-6);
    assert_eq!(v["equalized"], Value::Bool(true));

    let (code, out, _) = call(&["gram", "--circuit", "builtin:OR"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["matrix"][0][1][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(v["matrix"][0][3][0].as_f64().unwrap().abs() < 1e-12);

    let args = ["sample", "--circuit", "builtin:ANDOR2", "--f", "0101", "--shots", "20000", "--seed", "3"];
    let (code, a, _) = call(&args);
    assert_eq!(code, EXIT_OK);
    assert_eq!(a, call(&args).1, "same seed, same counts");
    let v: Value = serde_json::from_str(&a).unwrap();
    assert!(v["total_variation"].as_f64().unwrap() < 0.02);
}

#[test]
fn evolve_writes_circuit_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gp.cfg");
    std::fs::write(&cfg, "property = or\npopulation_size = 30\ngenerations = 5\n").unwrap();
    let best = dir.path().join("best.qc");
    let trace = dir.path().join("trace.csv");
    let args = [
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        best.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
        "--seed",
        "4",
    ];
    assert_eq!(call(&args).0, EXIT_OK);
    let text = std::fs::read_to_string(&best).unwrap();
    let p = qquery::parse_program(&text).unwrap();
    assert_eq!(p.oracle_count(), 1);
    assert_eq!(std::fs::read_to_string(&trace).unwrap().lines().count(), 7);
    let first = text.clone();
    assert_eq!(call(&args).0, EXIT_OK);
    assert_eq!(std::fs::read_to_string(&best).unwrap(), first);
}

#[test]
fn verify_quick_subset() {
    let (code, out, _) = call(&["verify", "--only", "1,9"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("PASS criterion  1"));
    assert!(out.contains("2 passed, 0 failed"));
}
