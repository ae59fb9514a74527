use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use qhorder::gadget::{apply_mutant, mutant_base, mutant_corpus};
use qhorder::graph::{directed_cycle, to_json};
use qhorder::report::REPORT_SCHEMA;
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stderr: String,
    report: Value,
}

fn qhorder(dir: &Path, args: &[&str]) -> Run {
    let report = dir.join(format!("report-{}.json", args.join("_").replace(['/', '.'], "-")));
    let out = Command::new(env!("CARGO_BIN_EXE_qhorder"))
        .current_dir(dir)
        .args(args)
        .arg("--report")
        .arg(&report)
        .env_remove("QHORDER_MAX_VERTICES")
        .output()
        .unwrap();
    let report = fs::read_to_string(&report).map(|t| serde_json::from_str(&t).unwrap()).unwrap_or(Value::Null);
    Run { code: out.status.code().unwrap(), stderr: String::from_utf8_lossy(&out.stderr).into_owned(), report }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn cycle_file(dir: &Path, n: usize) -> String {
    write(dir, &format!("c{n}.json"), &to_json(&directed_cycle(n).unwrap()));
    format!("c{n}.json")
}

fn assert_valid(report: &Value) {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{report}");
}

fn without_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn check_hom_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let (c6, c3, c4) = (cycle_file(d, 6), cycle_file(d, 3), cycle_file(d, 4));
    let yes = qhorder(d, &["check-hom", &c6, &c3, "--witness", "w.json"]);
    assert_eq!(yes.code, 0, "{}", yes.stderr);
    assert_eq!(yes.report["verdict"], "hom");
    let w: Value = serde_json::from_str(&fs::read_to_string(d.join("w.json")).unwrap()).unwrap();
    assert!(w.to_string().contains("c5"));
    assert_valid(&yes.report);
    let no = qhorder(d, &["check-hom", &c4, &c3]);
    assert_eq!(no.code, 1);
    assert_eq!(no.report["verdict"], "no-hom");
    assert_valid(&no.report);
}

#[test]
fn qprune_reports_infeasible_with_trace() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let (c4, c3) = (cycle_file(d, 4), cycle_file(d, 3));
    let run = qhorder(d, &["qprune", &c4, &c3, "--trace", "trace.json"]);
    assert_eq!(run.code, 3, "{}", run.stderr);
    assert_eq!(run.report["verdict"], "infeasible");
    assert_valid(&run.report);
    let trace = fs::read_to_string(d.join("trace.json")).unwrap();
    assert!(trace.contains("closed-walk"), "{trace}");
    let c6 = cycle_file(d, 6);
    let open = qhorder(d, &["qprune", &c6, &c3]);
    assert_eq!(open.code, 0);
    assert_eq!(open.report["verdict"], "unknown");
    let bad = qhorder(d, &["qprune", &c6, &c3, "--rules", "telepathy"]);
    assert_eq!(bad.code, 2);
}

#[test]
fn malformed_input_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "bad.json", "{\"kind\": \"digraph\", \"vertices\": [");
    let c3 = cycle_file(d, 3);
    let run = qhorder(d, &["check-hom", "bad.json", &c3]);
    assert_eq!(run.code, 2);
    assert_eq!(run.report["verdict"], "error");
    assert_valid(&run.report);
    assert_eq!(qhorder(d, &["check-hom", "missing.json", &c3]).code, 2);
}

#[test]
fn gadget_pipeline_and_mutants() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let built = qhorder(d, &["build-indicator", "--out", "j.json", "--meta", "j.meta.json"]);
    assert_eq!(built.code, 0, "{}", built.stderr);
    assert_valid(&built.report);
    write(d, "arc.json", r#"{"kind":"digraph","vertices":["u","v"],"edges":[["u","v"]]}"#);
    let rep = qhorder(d, &["replace", "arc.json", "--out", "y.json", "--meta", "y.meta.json"]);
    assert_eq!(rep.code, 0, "{}", rep.stderr);
    let ok = qhorder(d, &["verify-lemmas", "y.meta.json"]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert_eq!(ok.report["verdict"], "pass");
    assert_valid(&ok.report);
    let m = &mutant_corpus()[0];
    write(d, "mutant.meta.json", &apply_mutant(&mutant_base(), m).unwrap().to_json());
    let bad = qhorder(d, &["verify-lemmas", "mutant.meta.json"]);
    assert_eq!(bad.code, 4);
    assert_eq!(bad.report["verdict"], "fail");
    assert_valid(&bad.report);
    let dot = qhorder(d, &["replace", "arc.json", "--out", "y.dot", "--format", "dot"]);
    assert_eq!(dot.code, 0);
    assert!(fs::read_to_string(d.join("y.dot")).unwrap().starts_with("graph G {"));
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let (c6, c4) = (cycle_file(d, 6), cycle_file(d, 4));
    let first = qhorder(d, &["qprune", &c6, &c4]);
    let second = qhorder(d, &["qprune", &c6, &c4]);
    assert_eq!(without_timings(first.report.clone()), without_timings(second.report));
    let digest = first.report["inputs"][0]["sha256"].as_str().unwrap().to_string();
    assert_eq!(digest.len(), 64);
}

#[test]
fn embed_poset_writes_witnesses_and_certificates() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "v.json", r#"{"elements":["a","b","c"],"leq":[["a","b"],["a","c"]]}"#);
    let cyc = qhorder(d, &["embed-poset", "v.json", "--level", "D"]);
    assert_eq!(cyc.code, 0, "{}", cyc.stderr);
    assert_valid(&cyc.report);
    let run = qhorder(d, &["demo-universality", "v.json", "--out-dir", "out"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.report["verdict"], "pass");
    assert_valid(&run.report);
    let names: Vec<String> =
        fs::read_dir(d.join("out")).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    for expected in ["element-0.cycles.json", "element-0.phi.json", "pair-0-1.witness.json", "pair-1-0.certificate.json"] {
        assert!(names.iter().any(|n| n == expected), "{expected} missing from {names:?}");
    }
    let too_big = qhorder(d, &["embed-poset", "v.json", "--max-elements", "2"]);
    assert_eq!(too_big.code, 2);
}
