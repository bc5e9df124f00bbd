use serde_json::Value;

use pisotfactor::corpus::{self, CORPUS};
use pisotfactor::pair_dynamics::Caps;
use pisotfactor::report::{analyze, factor_json, run_corpus, summary_table, AnalysisOptions, Which};
use pisotfactor::Substitution;

/// No null anywhere: a value is present or says why not.
fn no_nulls(v: &Value, path: &str) {
    match v {
        Value::Null => panic!("null at {path}"),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| no_nulls(x, &format!("{path}[{i}]"))),
        Value::Object(m) => m.iter().for_each(|(k, x)| no_nulls(x, &format!("{path}.{k}"))),
        _ => {}
    }
}

const TOP: [&str; 12] = [
    "schema",
    "input",
    "classification",
    "perron",
    "properization",
    "coincidence_rank",
    "factors",
    "cohomology",
    "crc_verdict",
    "asymptotic_cycles",
    "metadata",
    "errors",
];

#[test]
fn every_report_is_complete_and_round_trips() {
    for c in CORPUS {
        let r = analyze(&c.substitution(), &AnalysisOptions::default()).unwrap();
        let keys: Vec<&str> = r.json.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, TOP, "{}", c.name);
        no_nulls(&r.json, c.name);
        let text = serde_json::to_string(&r.json).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r.json);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        let input = Substitution::from_json(&r.json["input"]).unwrap();
        assert_eq!(input.rules(), c.substitution().rules());
    }
}

#[test]
fn thue_morse_report() {
    let r = analyze(&corpus::lookup("thue-morse").unwrap().substitution(), &AnalysisOptions::default()).unwrap();
    let j = &r.json;
    assert_eq!(j["coincidence_rank"]["cr"], 2);
    assert_eq!(j["classification"]["proper"], false);
    assert_eq!(j["crc_verdict"]["theorem_applies"], false);
    assert_eq!(j["factors"]["psi_p"]["reduced"]["rules"].as_object().unwrap().len(), 2);
    let proper_cycles = &j["asymptotic_cycles"]["proper"];
    assert!(proper_cycles["seed_cycles"].as_array().unwrap().is_empty());
    assert!(!proper_cycles["fixed_tilings"]["cycles"].as_array().unwrap().is_empty());
}

#[test]
fn non_pisot_control_degrades_gracefully() {
    let r = analyze(&corpus::lookup("non-pisot").unwrap().substitution(), &AnalysisOptions::default()).unwrap();
    let j = &r.json;
    assert_eq!(j["classification"]["pisot"], false);
    for key in ["coincidence_rank", "factors", "crc_verdict"] {
        assert!(j[key].as_str().unwrap().starts_with("not applicable: "), "{key}");
    }
    assert!(j["asymptotic_cycles"]["input"]["fixed_tilings"].as_str().unwrap().starts_with("not applicable"));
    assert!(j["errors"].as_array().unwrap().is_empty());
}

#[test]
fn non_primitive_input_is_reported_not_rejected() {
    let s = Substitution::from_rules("split", &[("a", "a"), ("b", "ab")]).unwrap();
    let r = analyze(&s, &AnalysisOptions::default()).unwrap();
    assert_eq!(r.json["classification"]["primitive"], false);
    assert!(r.json["perron"].as_str().unwrap().contains("not primitive"));
}

#[test]
fn corpus_run_isolates_failures() {
    let items = corpus::filtered(Some("^(fibonacci|thue-morse)$")).unwrap();
    let opts = AnalysisOptions {
        caps: Caps { states: 3, ..Caps::default() },
        keep_going: false,
        timings: false,
    };
    let (reports, rows) = run_corpus(&items, &opts);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.verdict.starts_with("error (cap)")));
    assert!(reports.iter().all(|r| r["errors"].as_array().unwrap().len() == 1));
    let table = summary_table(&rows);
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn corpus_runs_are_deterministic() {
    let items = corpus::filtered(None).unwrap();
    let a = run_corpus(&items, &AnalysisOptions::default());
    let b = run_corpus(&items, &AnalysisOptions::default());
    assert_eq!(serde_json::to_string(&a.0).unwrap(), serde_json::to_string(&b.0).unwrap());
    assert_eq!(a.1, b.1);
}

#[test]
fn factor_requests_name_their_preconditions() {
    let fib = corpus::lookup("fibonacci").unwrap().substitution();
    for w in [Which::S, Which::Op, Which::P] {
        let e = factor_json(&fib, w, &Caps::default()).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("pure discrete"));
    }
    let tm = corpus::lookup("thue-morse").unwrap().substitution();
    let s = factor_json(&tm, Which::S, &Caps::default()).unwrap();
    assert_eq!(s["factor"], "s");
    assert!(s["sidecar"].is_object());
}
