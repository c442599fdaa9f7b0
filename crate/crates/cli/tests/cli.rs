use std::fs;
use std::path::{Path, PathBuf};
use std::process::Output;

use coevent_cli::run::{ConsistentResult, MeasuredEvent, ValidateResult};
use coevent_cli::{
    execute, parse_document, parse_predictions, render, CliError, Command, Format, Mode, Results, RunOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const BUNDLED: [&str; 5] = ["qubit.json", "qubit_one.json", "three_slit.json", "fair_coin.json", "biased_coin.json"];

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn coevent(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_coevent"))
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

fn write_json(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn exec(command: Command, path: &Path) -> Result<Results, CliError> {
    execute(&command, path, &RunOptions::default()).map(|r| r.results)
}

fn random_amplitude_doc(seed: u64) -> Value {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let n = r.random_range(1..=8);
    let amplitudes: Vec<Value> = (0..n)
        .map(|i| {
            json!({
                "history_label": format!("x{i}"),
                "amplitude": [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)],
                "final_class": if r.random_bool(0.5) { "a" } else { "b" },
            })
        })
        .collect();
    json!({ "mode": "amplitudes", "amplitudes": amplitudes })
}

#[test]
fn bundled_documents_round_trip() {
    for name in BUNDLED {
        let text = fs::read_to_string(data(name)).unwrap();
        let doc = parse_document(&text, name).unwrap();
        let again = parse_document(&doc.to_json(), name).unwrap();
        assert_eq!(doc, again, "{name}");
        assert_eq!(doc.to_json(), again.to_json());
    }
}

#[test]
fn random_documents_round_trip() {
    for seed in 0..50 {
        let text = serde_json::to_string(&random_amplitude_doc(seed)).unwrap();
        let doc = parse_document(&text, "random").unwrap();
        assert_eq!(doc.mode, Mode::Amplitudes);
        assert_eq!(parse_document(&doc.to_json(), "random").unwrap(), doc, "seed {seed}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let random = write_json(dir.path(), "random.json", &random_amplitude_doc(7));
    let cases: Vec<(Vec<&str>, PathBuf)> = vec![
        (vec!["validate"], data("qubit.json")),
        (vec!["preclude"], data("qubit.json")),
        (vec!["zerocover"], data("qubit.json")),
        (vec!["coevents"], data("three_slit.json")),
        (vec!["partition"], data("qubit.json")),
        (vec!["coevents"], random.clone()),
        (vec!["partition"], random),
        (vec!["consistent", "[[\"h1\",\"h3\"],[\"h2\"]]"], data("three_slit.json")),
    ];
    for (args, input) in cases {
        let mut full = args.clone();
        full.extend(["--input", input.to_str().unwrap()]);
        let a = coevent(&full);
        let b = coevent(&full);
        assert!(a.status.success(), "{full:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{full:?}");
        full.extend(["--format", "text"]);
        assert_eq!(coevent(&full).stdout, coevent(&full).stdout, "{full:?}");
    }
}

#[test]
fn floats_print_with_seventeen_significant_digits() {
    let out = coevent(&["validate", "--input", data("qubit.json").to_str().unwrap()]);
    let text = stdout(&out);
    // 1/(2√2) and 1/8, each to seventeen significant digits
    assert!(text.contains("3.5355339059327368e-1"), "{text}");
    assert!(text.contains("1.2499999999999994e-1"), "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["command"], "validate");
    assert_eq!(v["inputs"]["histories"], 8);
    assert!(v.get("wall_time_seconds").is_none());
}

#[test]
fn timing_is_opt_in() {
    let out = coevent(&["coevents", "--timing", "--input", data("qubit.json").to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.txt");
    let input = data("qubit.json");
    let args = ["coevents", "--format", "text", "--input", input.to_str().unwrap()];
    let direct = coevent(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", target.to_str().unwrap()]);
    let out = coevent(&with_out);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read(&target).unwrap(), direct.stdout);
    let text = stdout(&direct);
    assert!(text.starts_with("command: coevents"), "{text}");
    assert!(text.contains("[001, 010]"), "{text}");
}

#[test]
fn measure_accepts_both_event_syntaxes() {
    let path = data("qubit.json");
    let a = exec(Command::Measure { event: "000,001".into() }, &path).unwrap();
    let b = exec(Command::Measure { event: "[\"001\", \"000\"]".into() }, &path).unwrap();
    let (Results::Measure(MeasuredEvent { mu: ma, .. }), Results::Measure(MeasuredEvent { mu: mb, .. })) = (a, b)
    else {
        panic!("wrong result kind")
    };
    assert_eq!(ma, mb);
    assert!(ma.abs() < 1e-12);
    let err = exec(Command::Measure { event: "000,nope".into() }, &path).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn measure_table_documents_reproduce_their_entries() {
    let Results::Measure(MeasuredEvent { mu, .. }) =
        exec(Command::Measure { event: "H".into() }, &data("biased_coin.json")).unwrap()
    else {
        panic!()
    };
    assert!((mu - 0.3).abs() < 1e-15);
    let Results::Consistent(ConsistentResult { consistent, classical, .. }) =
        exec(Command::Consistent { partition: "[[\"H\"],[\"T\"]]".into() }, &data("fair_coin.json")).unwrap()
    else {
        panic!()
    };
    assert!(consistent && classical);
}

#[test]
fn validate_reports_violations_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(data("qubit.json")).unwrap()).unwrap();
    doc["steps"][0]["projectors"][0]["matrix"] = json!([[[1, 0], [0, 0]], [[0, 0], [0, 0.5]]]);
    let path = write_json(dir.path(), "bad.json", &doc);
    let Results::Validate(ValidateResult { valid, violations, .. }) = exec(Command::Validate, &path).unwrap() else {
        panic!()
    };
    assert!(!valid);
    assert!(!violations.is_empty());
    let out = coevent(&["preclude", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).starts_with("error[domain]"));
}

#[test]
fn schema_errors_exit_two_with_a_path() {
    let dir = tempfile::tempdir().unwrap();
    let three = data("three_slit.json");
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(&three).unwrap()).unwrap();

    doc["amplitudes"][1]["phase"] = json!(0.0);
    let unknown = write_json(dir.path(), "unknown.json", &doc);
    let out = coevent(&["validate", "--input", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("amplitudes[1]"), "{}", stderr(&out));
    assert!(stderr(&out).starts_with("error[schema]"));

    let mut both = doc.clone();
    both["amplitudes"][1].as_object_mut().unwrap().remove("phase");
    both["dimension"] = json!(2);
    let both = write_json(dir.path(), "both.json", &both);
    assert_eq!(coevent(&["validate", "--input", both.to_str().unwrap()]).status.code(), Some(2));

    let mut table: Value = serde_json::from_str(&fs::read_to_string(data("fair_coin.json")).unwrap()).unwrap();
    let entries = table["measure_table"].as_array_mut().unwrap();
    entries.retain(|e| e["event"].as_array().unwrap().len() < 2);
    let missing = write_json(dir.path(), "missing.json", &table);
    let out = coevent(&["validate", "--input", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{\"mode\": \"amplitudes\", ").unwrap();
    let out = coevent(&["validate", "--input", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error[malformed]"));
}

#[test]
fn unnormalised_measure_table_is_rejected() {
    let text = r#"{"mode":"measure_table","histories":["a","b"],
        "measure_table":[{"event":["a"],"mu":0.5},{"event":["b"],"mu":0.4},{"event":["a","b"],"mu":0.9}]}"#;
    let doc = parse_document(text, "t").unwrap();
    let err = doc.load("t").unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert_eq!(err.class(), "invariant");
}

#[test]
fn capacity_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let amplitudes: Vec<Value> = (0..25).map(|i| json!({"history_label": format!("h{i}"), "amplitude": [0.2, 0.0]})).collect();
    let big = write_json(dir.path(), "big.json", &json!({"mode": "amplitudes", "amplitudes": amplitudes}));
    let out = coevent(&["coevents", "--input", big.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).starts_with("error[capacity]"));
    // single-event measures stay available
    assert!(coevent(&["measure", "h1", "--input", big.to_str().unwrap()]).status.success());

    let heads: Vec<&str> = vec!["H"; 25];
    let decl = write_json(
        dir.path(),
        "pred.json",
        &json!({"copies": 25, "events": [{"description": "all heads", "event": [heads]}]}),
    );
    let out = coevent(&["predict", decl.to_str().unwrap(), "--input", data("fair_coin.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn argument_and_io_errors() {
    let qubit = data("qubit.json");
    let q = qubit.to_str().unwrap();
    assert_eq!(coevent(&["coevents", "--epsilon", "2", "--input", q]).status.code(), Some(2));
    assert_eq!(coevent(&["coevents"]).status.code(), Some(2));
    assert_eq!(coevent(&["consistent", "[[\"000\"]]", "--input", q]).status.code(), Some(2));
    let out = coevent(&["validate", "--input", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error[io]"));
    let three = data("three_slit.json");
    let out = coevent(&["compare", three.to_str().unwrap(), "--input", q]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn prediction_files_are_checked() {
    let good = fs::read_to_string(data("coin_predictions.json")).unwrap();
    let file = parse_predictions(&good, "p").unwrap();
    assert_eq!(file.copies, 20);
    assert_eq!(file.events.len(), 3);
    for bad in [
        r#"{"copies":2,"events":[{"description":"x","event":["H"]}]}"#,
        r#"{"copies":1,"events":[{"description":"x"}]}"#,
        r#"{"copies":1,"events":[{"description":"x","event":["H"],"frequency":{"event":["H"],"p":0.5,"delta":0.1}}]}"#,
    ] {
        assert_eq!(parse_predictions(bad, "p").unwrap_err().exit_code(), 2, "{bad}");
    }
}

#[test]
fn predict_flags_twenty_heads() {
    let report = execute(
        &Command::Predict {
            file: data("coin_predictions.json"),
        },
        &data("fair_coin.json"),
        &RunOptions {
            epsilon: Some(1e-5),
            timing: false,
        },
    )
    .unwrap();
    let v: Value = serde_json::from_str(&render(&report, Format::Json)).unwrap();
    let entries = v["results"]["entries"].as_array().unwrap();
    assert_eq!(entries[0]["approximately_precluded"], true);
    assert_eq!(entries[0]["measure"].as_f64().unwrap(), 2f64.powi(-20));
    assert_eq!(entries[2]["approximately_precluded"], false);
    assert!(v["results"]["note"].as_str().is_some_and(|s| !s.is_empty()));
}

#[test]
fn compare_finds_shared_coevents() {
    let out = coevent(&[
        "compare",
        data("qubit_one.json").to_str().unwrap(),
        "--input",
        data("qubit.json").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["results"]["disjoint"], false);
    assert_eq!(v["results"]["shared"], json!([["001", "011"], ["100", "110"]]));
}
